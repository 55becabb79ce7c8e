a = 0
b = 0

def swap():
    global a, b
    a, b = b, a

def show():
    return a - b
