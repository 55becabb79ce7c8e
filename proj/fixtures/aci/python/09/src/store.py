class Store:
    def __init__(self):
        self.data = {}

    def put(self, k, v):
        self.data[k] = v

def main():
    s = Store()
    s.put("a", 1)
    print(s.data)
