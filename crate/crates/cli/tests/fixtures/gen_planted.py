"""Regenerates planted_1000.jsonl, a synthetic corpus with a known outcome per sample.

Usage: python3 gen_planted.py > planted_1000.jsonl
Every sample carries its intended outcome in the "planted" field. Words are
unique pseudo-words, so no text is accidentally contained in another.
Duplicates always come after the sample they copy.
"""
import json
import random

rng = random.Random(20240601)
ONSETS = "b d f g k l m n p r s t v w z".split() + ["br", "gr", "kl", "st", "tr", "schl"]
VOWELS = ["a", "e", "i", "o", "u", "ä", "ö", "ü", "ei", "au"]
CODAS = ["", "n", "r", "s", "t", "l", "ch", "m"]
seen = set()


def word():
    while True:
        w = "".join(rng.choice(ONSETS) + rng.choice(VOWELS) + rng.choice(CODAS) for _ in range(rng.randint(2, 3)))
        if w not in seen:
            seen.add(w)
            return w


def text(n, capital=True):
    words = [word() for _ in range(n)]
    if capital:
        words[0] = words[0].capitalize()
    return " ".join(words) + "."


def clean():
    return text(rng.randint(30, 60)), text(rng.randint(6, 12))


samples = []


def add(kind, ref, summ):
    samples.append({"reference": ref, "summary": summ, "planted": kind})


for _ in range(300):
    add("valid", *clean())
def short(limit, n):
    while True:
        t = text(n)
        if len(t) < limit:
            return t


for _ in range(100):
    add("minlen_ref", short(50, 3), text(8))
for _ in range(100):
    add("minlen_summary", text(30), short(20, 2))
for _ in range(50):
    r = text(20)
    add("identity", r, "  " + r.replace(" ", "  ") + " ")
for _ in range(100):
    n = rng.randint(10, 20)
    add("min_cr", text(n), text(n))
for _ in range(200):
    words = [word() for _ in range(40)]
    start = rng.randint(0, 30)
    add("fully_extractive", " ".join(words) + ".", " ".join(words[start : start + 8]).upper())

originals = rng.sample([s for s in samples if s["planted"] == "valid"], 150)
for orig in originals[:50]:
    add("dup_exact", orig["reference"], orig["summary"])
for orig in originals[50:100]:
    add("dup_reference", orig["reference"], text(8))
for orig in originals[100:]:
    add("dup_summary", text(40), orig["summary"])
copies = dict(zip(map(id, samples[-150:]), originals))

rng.shuffle(samples)
pos = {id(s): i for i, s in enumerate(samples)}
for dup_id, orig in copies.items():
    i, j = pos[dup_id], pos[id(orig)]
    if i < j:
        samples[i], samples[j] = samples[j], samples[i]
        pos[dup_id], pos[id(orig)] = j, i

for i, s in enumerate(samples):
    row = {"id": f"p{i:04d}", "reference": s["reference"], "summary": s["summary"], "split": "train", "planted": s["planted"]}
    print(json.dumps(row, ensure_ascii=False))
