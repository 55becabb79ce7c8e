class K {
    static final int A = 3;
    static final int B = A * 2;

    int f() {
        return B;
    }
}
