interface Shape {
    double area();
}

class Sq implements Shape {
    double side = 2;

    public double area() {
        return side * side;
    }
}
