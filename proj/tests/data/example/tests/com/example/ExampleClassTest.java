package com.example;

import static org.junit.Assert.assertEquals;

import org.junit.Test;

public class ExampleClassTest {

    @Test
    public void testExampleMethod() {
        ExampleClass example = new ExampleClass();
        String result = example.exampleMethod(7, "abc");
        assertEquals("abc7", result);
    }
}
