package com.example;

import java.util.List;
import java.io.File;

public class ExampleClass extends BaseClass implements InterfaceA {
    private int counter;

    /**
     * This method performs example functionality.
     */
    public String exampleMethod(int param1, String param2) {
        counter++;
        return param2 + param1;
    }
}
