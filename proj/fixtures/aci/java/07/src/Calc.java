class Calc {
    static int add(int a, int b) {
        return a + b;
    }

    static double add(double a, double b) {
        return a + b;
    }

    static int twice(int v) {
        return add(v, v);
    }
}
