limit = 10

def local_only():
    limit = 3
    return limit

def check(v):
    return v < limit
