def norm(v):
    return v / 10

def total(xs):
    return sum(norm(x) for x in xs)
