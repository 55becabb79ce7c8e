class Init {
    int a;
    int b;

    {
        a = 1;
        b = a + 1;
    }
}
