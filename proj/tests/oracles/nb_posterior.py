"""Exact multinomial naive Bayes posterior (alpha=1) for the 6-document fixture.

Independent of the C++ implementation: rational arithmetic, no logs.
Unknown query words are skipped; priors are document frequencies.
"""
from fractions import Fraction
import re

CORPUS = [
    ("excellent food and excellent service", "positive"),
    ("the staff were excellent", "positive"),
    ("terrible food and bad service", "negative"),
    ("the staff were rude", "negative"),
    ("the food arrived at noon", "neutral"),
    ("service starts at nine", "neutral"),
]
LABELS = ["negative", "neutral", "positive"]


def words(text):
    return [w.lower() for w in re.findall(r"[A-Za-z0-9]+(?:'[A-Za-z0-9]+)*", text)]


def posterior(query):
    vocab = sorted({w for t, _ in CORPUS for w in words(t)})
    counts = {c: {} for c in LABELS}
    totals = {c: 0 for c in LABELS}
    docs = {c: 0 for c in LABELS}
    for text, c in CORPUS:
        docs[c] += 1
        for w in words(text):
            counts[c][w] = counts[c].get(w, 0) + 1
            totals[c] += 1
    score = {}
    for c in LABELS:
        s = Fraction(docs[c], len(CORPUS))
        for w in words(query):
            if w not in vocab:
                continue
            s *= Fraction(counts[c].get(w, 0) + 1, totals[c] + len(vocab))
        score[c] = s
    z = sum(score.values())
    return {c: score[c] / z for c in LABELS}


if __name__ == "__main__":
    for q in ["excellent excellent excellent excellent excellent", "this is excellent",
              "completely unseen words here"]:
        p = posterior(q)
        print(q, {c: f"{float(v):.17g}" for c, v in p.items()})
