class Settings:
    debug = False
    level = 1 if debug else 2

    def show(self):
        return self.level
