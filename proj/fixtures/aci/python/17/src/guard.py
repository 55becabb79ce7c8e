def square(x):
    return x * x

if __name__ == "__main__":
    val = square(3)
    print(val)
