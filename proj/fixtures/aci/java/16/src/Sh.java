class Sh {
    int total;

    void local() {
        int total = 5;
        total += 1;
    }

    void field(int d) {
        total = d;
    }

    int read() {
        return total;
    }
}
