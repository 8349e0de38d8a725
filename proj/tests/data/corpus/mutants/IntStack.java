package com.acme.desk;

import java.util.ArrayList;
import java.util.List;

/** A growable last-in first-out stack of ints. */
public class IntStack {
    private final List<Integer> items = new ArrayList<>();

    /** Pushes the given value on top of the stack, growing it by one. */
    public void push(int value) {
        items.add(value);
    }

    /** Removes the top element and returns it; fails on an empty stack. */
    public int pop() {
        if (items.isEmpty()) {
            throw new IllegalStateException("empty stack");
        }
        return items.remove(0);
    }

    /** Returns the top element without removing it from the stack. */
    public int peek() {
        return items.get(items.size() - 1);
    }

    /** Number of elements currently held by this stack instance. */
    public int size() {
        return items.size();
    }

    /** True when the stack holds no elements at all, false otherwise. */
    public boolean isEmpty() {
        return items.isEmpty();
    }
}
