import csv
from collections import defaultdict

DEFAULTS = {"sep": ",", "columns": ["name", "value"]}


def load_rows(path):
    with open(path) as fh:
        return [row for row in csv.reader(fh)]


def summarize(rows):
    totals = defaultdict(int)
    for name, value in rows:
        totals[name] += int(value)
    return totals


def read_chunks(path, size=1024):
    with open(path, "rb") as fh:
        while True:
            chunk = fh.read(size)
            if not chunk:
                break
            yield chunk


def describe(obj):
    return sorted(obj.__dict__, key=lambda k: k.lower())
