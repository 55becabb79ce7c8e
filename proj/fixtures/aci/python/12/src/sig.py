def f(a: int, b: str = "x", *rest, key=None, **opts) -> int:
    return a

def g(*args: int) -> int:
    return f(*args)
