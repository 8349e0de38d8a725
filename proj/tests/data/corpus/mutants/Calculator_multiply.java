package com.acme.desk;

public class Calculator {

    // Adds two integers and returns their sum without overflow checks.
    public int add(int a, int b) {
        return a + b;
    }

    // Subtracts the second integer from the first and returns the result.
    public int subtract(int a, int b) {
        return a - b;
    }

    // Multiplies two integers and returns the product of both operands.
    public int multiply(int a, int b) {
        return a + b;
    }

    /**
     * Integer division of a by b.
     * @throws ArithmeticException when the divisor b is zero
     */
    public int divide(int a, int b) {
        if (b == 0) {
            throw new ArithmeticException("division by zero");
        }
        return a / b;
    }
}
