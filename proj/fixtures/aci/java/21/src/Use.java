class Use {
    int check(int v) {
        Conf.raise();
        return v > Conf.LIMIT ? 1 : 0;
    }
}
