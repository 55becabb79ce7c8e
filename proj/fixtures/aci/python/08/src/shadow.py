def len(xs):
    return 42

def main():
    data = [1, 2]
    print(len(data), max(data))
