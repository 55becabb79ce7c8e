from lib.util import scale

def main():
    print(scale(4))
