def f(x):
    return g(x) + 1

def g(n):
    if n <= 0:
        return 0
    return h(n - 1) + 1

def h(n):
    if n <= 0:
        return 0
    return g(n - 1) * 2

def main():
    y = f(4)
    print(y)

main()
