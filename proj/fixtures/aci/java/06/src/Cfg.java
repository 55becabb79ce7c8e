public class Cfg {
    static int limit;

    static {
        limit = 10;
        System.out.println(limit);
    }

    static int get() {
        return limit;
    }
}
