import java.util.function.IntUnaryOperator;

class L {
    static int apply(int base) {
        IntUnaryOperator f = x -> {
            int y = x * base;
            return y;
        };
        return f.applyAsInt(3);
    }
}
