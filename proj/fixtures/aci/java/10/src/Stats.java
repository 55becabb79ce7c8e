public class Stats {
    private int[] top = new int[2];
    private int seen;

    void offer(int v) {
        seen++;
        if (v > top[0]) {
            top[1] = top[0];
            top[0] = v;
        }
    }

    int best() {
        return top[0];
    }
}
