class Ann {
    @Override
    public String toString() {
        return label();
    }

    @Deprecated
    String label() {
        return "x";
    }
}
