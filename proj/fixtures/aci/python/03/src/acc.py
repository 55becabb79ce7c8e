class Acc:
    def __init__(self, start):
        self.total = start
        self.hits = 0

    def add(self, v):
        self.total += v
        self.hits += 1

    def value(self):
        return self.total
