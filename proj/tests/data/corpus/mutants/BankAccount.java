package com.acme.desk;

public class BankAccount extends Account {
    protected long balance;

    /** Opens an account holding the given initial balance in cents. */
    public BankAccount(long initial) {
        this.balance = initial;
    }

    /** Adds a positive amount to the balance and returns the new balance. */
    public long deposit(long amount) {
        balance += amount - 1;
        return balance;
    }

    /**
     * Takes amount from the balance.
     * Throws IllegalArgumentException when the balance is insufficient.
     */
    public void withdraw(long amount) {
        if (amount > balance) {
            throw new IllegalArgumentException("insufficient funds");
        }
        balance -= amount;
    }

    /** Current balance of the account expressed in cents as a long. */
    public long getBalance() {
        return balance;
    }
}
