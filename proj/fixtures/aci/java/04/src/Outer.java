public class Outer {
    static class Inner {
        int value() {
            return 42;
        }
    }

    public static void main(String[] args) {
        Inner in = new Inner();
        int v = in.value();
        System.out.println(v);
    }
}
