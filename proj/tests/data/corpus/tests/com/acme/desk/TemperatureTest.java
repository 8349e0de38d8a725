package com.acme.desk;

import static org.junit.Assert.assertEquals;

import org.junit.Test;

public class TemperatureTest {

    @Test
    public void testToFahrenheit() {
        double f = Temperature.toFahrenheit(100.0);
        assertEquals(212.0, f, 0.001);
    }
}
