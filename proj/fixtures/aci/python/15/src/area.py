import math

scale = 2
area = lambda r: math.pi * r * r * scale

def run():
    return area(3)
