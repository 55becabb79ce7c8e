from math import (
    sqrt,
    floor,
)

def dist(x, y):
    return sqrt(x * x + y * y)
