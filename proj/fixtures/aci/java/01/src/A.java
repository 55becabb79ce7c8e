public class A {
    public static void main(String[] args) {
        int x = 1;
        int y = x + 2;
        System.out.println(y);
    }
}
