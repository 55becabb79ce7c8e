import java.util.List;
import java.util.ArrayList;

public class B {
    static int count = 0;
    static List<String> names = new ArrayList<>();

    static void inc(int k) {
        count += k;
    }

    public static void main(String[] args) {
        inc(2);
        inc(3);
        System.out.println(count);
    }
}
