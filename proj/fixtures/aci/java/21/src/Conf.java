class Conf {
    static int LIMIT = 5;

    static void raise() {
        LIMIT = LIMIT * 2;
    }
}
