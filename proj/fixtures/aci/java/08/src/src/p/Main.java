package p;

import java.util.Scanner;

public class Main {
    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        int n = Util.inc(sc.nextInt());
        System.out.println(n);
    }
}
