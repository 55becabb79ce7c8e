public class Anon {
    interface Greeter {
        String greet();
    }

    static String run() {
        Greeter g = new Greeter() {
            public String greet() {
                return "hi";
            }
        };
        return g.greet();
    }
}
