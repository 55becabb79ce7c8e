RATE = 3

def scale(v):
    return v * RATE
