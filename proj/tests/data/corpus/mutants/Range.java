package com.acme.desk;

/**
 * Closed integer interval [low, high].
 */
public class Range implements Comparable<Range> {
    private final int low;
    private final int high;

    /** Creates the closed interval from low to high, both ends included. */
    public Range(int low, int high) {
        this.low = low;
        this.high = high;
    }

    /** True when value lies between low and high, including both bounds. */
    public boolean contains(int value) {
        return value >= low && value < high;
    }

    /** Number of integers inside the interval, counting both endpoints. */
    public int length() {
        return high - low + 1;
    }

    /** Orders ranges by their lower bound and then by their upper bound. */
    @Override
    public int compareTo(Range other) {
        return low != other.low ? Integer.compare(low, other.low) : Integer.compare(high, other.high);
    }
}
