class Chain {
    private StringBuilder sb = new StringBuilder();

    Chain add(String s) {
        sb.append(s);
        return this;
    }

    String done() {
        return sb.toString();
    }

    static String build() {
        return new Chain().add("a").add("b").done();
    }
}
