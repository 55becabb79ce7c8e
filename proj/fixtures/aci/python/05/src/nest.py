def outer(a):
    def inner(b):
        return a + b
    return inner(2)

r = outer(1)
