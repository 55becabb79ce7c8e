import java.util.ArrayList;
import java.util.List;

class Box<T> {
    private final List<T> items = new ArrayList<>();

    Box(T first) {
        items.add(first);
    }

    int size() {
        return items.size();
    }

    static int demo() {
        Box<String> b = new Box<>("a");
        return b.size();
    }
}
