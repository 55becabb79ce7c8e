import json

CONFIG = "c.json"

def load():
    with open(CONFIG) as fh:
        return json.load(
            fh
        )
