package p;

public class Util {
    public static int inc(int x) {
        return x + 1;
    }
}
