import java.util.Scanner;

public class Main {
    static int[] list = new int[3];
    static int calls = 0;

    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        int n = sc.nextInt();
        for (int i = 0; i < n; i++) {
            int a = sc.nextInt();
            max(a);
        }
        if (n > 100) {
            System.out.println("large");
        } else {
            System.out.println("small");
        }
        System.out.println(list[0] + list[1] + list[2]);
    }

    static void max(int a) {
        calls++;
        if (a > list[0]) {
            list[2] = list[1];
            list[1] = list[0];
            list[0] = a;
        } else if (a > list[1]) {
            list[2] = list[1];
            list[1] = a;
        } else if (a > list[2]) {
            list[2] = a;
        }
    }
}
