import os

counter = 0

def bump(k):
    global counter
    counter += k

def main():
    bump(2)
    print(counter)
