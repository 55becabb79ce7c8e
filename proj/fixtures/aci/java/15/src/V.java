class V {
    static int sum(int... xs) {
        int s = 0;
        for (int x : xs) {
            s += x;
        }
        return s;
    }

    static int first(int[][] grid) {
        return grid[0][0];
    }

    public static void main(String[] args) {
        int t = sum(1, 2, 3);
        System.out.println(t + first(new int[][] {{1}}));
    }
}
