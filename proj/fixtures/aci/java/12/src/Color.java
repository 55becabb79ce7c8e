enum Color {
    RED, GREEN;

    String lower() {
        return name().toLowerCase();
    }
}
