package com.acme.desk;

import static org.junit.Assert.assertEquals;

import org.junit.Test;

public class CounterTest {

    @Test
    public void testIncrement() {
        Counter c = new Counter();
        c.increment();
        c.increment();
    }
}
