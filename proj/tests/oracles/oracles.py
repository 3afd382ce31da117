#!/usr/bin/env python3
"""Independent reference values for the C++ test suite.

Every quantity is recomputed from the rule definitions with plain Python,
without touching the C++ code. Output goes to tests/fixtures/oracles/expected.json;
--check recomputes and fails when the checked-in file is stale.
"""

import argparse
import json
import math
import re
import sys
from collections import Counter
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1] / "fixtures"
OUT = ROOT / "oracles" / "expected.json"

MASK = (1 << 64) - 1
SEED = 0x5EED5EED2024
GOLDEN = 0x9E3779B97F4A7C15
DIM = 512
HASHES = 4

JAVA_KEYWORDS = set("""
abstract assert boolean break byte case catch char class const continue default do
double else enum extends final finally float for goto if implements import instanceof
int interface long native new package private protected public return short static
strictfp super switch synchronized this throw throws transient try void volatile while
var record yield sealed permits true false null
""".split())


def tokenize(text):
    return [t.lower() for t in re.findall(r"[A-Za-z0-9]+", text)]


def fnv1a(data):
    h = 0xCBF29CE484222325
    for b in data.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def splitmix(x):
    x = (x + GOLDEN) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def slots(token):
    base = fnv1a(token)
    out = []
    for j in range(HASHES):
        h = splitmix(base ^ ((SEED + GOLDEN * (j + 1)) & MASK))
        out.append((h % DIM, -1 if (h >> 40) & 1 else 1))
    return out


def embed(text):
    tokens = tokenize(text) or [text.strip()]
    v = [0.0] * DIM
    for t in tokens:
        for pos, sign in slots(t):
            v[pos] += sign
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = sum(x * x for x in a)
    nb = sum(y * y for y in b)
    return max(-1.0, min(1.0, dot / math.sqrt(na * nb)))


def fragments(identifier):
    parts = re.findall(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+", identifier)
    return [p.lower() for p in parts if len(p) >= 2]


def overlap(comment_tokens, issue_tokens):
    c = set(comment_tokens)
    if not c:
        return 0.0
    return len(c & set(issue_tokens)) / len(c)


def similarity_matrix():
    sentences = (ROOT / "similarity" / "sentences20.txt").read_text().splitlines()
    vecs = [embed(s) for s in sentences]
    matrix = [[cosine(a, b) for b in vecs] for a in vecs]
    disjoint_zero = []
    for i, a in enumerate(sentences):
        for j, b in enumerate(sentences):
            if j <= i:
                continue
            ta, tb = set(tokenize(a)), set(tokenize(b))
            if ta & tb:
                continue
            pa = {p for t in ta for p, _ in slots(t)}
            pb = {p for t in tb for p, _ in slots(t)}
            if not pa & pb:
                disjoint_zero.append([i, j])
    probe = {t: [[p, s] for p, s in slots(t)] for t in ["pulsar", "consumer", "broker", "a"]}
    return {"matrix": matrix, "collision_free_disjoint_pairs": disjoint_zero, "token_slots": probe}


def overlap_oracle():
    fx = json.loads((ROOT / "text" / "overlap_fixture.json").read_text())
    issues = [tokenize(s) for s in fx["issues"]]
    rows = []
    for c in fx["comments"]:
        ct = tokenize(c)
        ratios = [overlap(ct, it) for it in issues]
        best = max(ratios)
        rows.append({"best_ratio": best, "best_issue": ratios.index(best), "ratios": ratios})
    kept = [i for i, r in enumerate(rows) if r["best_ratio"] > fx["threshold"]]
    return {"rows": rows, "kept": kept}


def word_count():
    j = json.loads((ROOT / "issues" / "HBASE-24957.json").read_text())
    f = j["fields"]
    texts = [f.get("summary") or "", f.get("description") or ""]
    texts += [c.get("body") or "" for c in f["comment"]["comments"]]
    return sum(len(re.findall(r"[A-Za-z0-9]+", t)) for t in texts)


def background(corpus):
    counts = Counter(t for line in corpus for t in tokenize(line))
    total = sum(counts.values())
    denom = total + len(counts) + 1
    return counts, total, lambda t: (counts.get(t, 0) + 1) / denom


def code_vocab(code):
    vocab = set(tokenize(code))
    for ident in re.findall(r"[A-Za-z_$][A-Za-z0-9_$]*", code):
        if ident in JAVA_KEYWORDS:
            continue
        vocab.add(ident.lower())
        vocab.update(fragments(ident))
    return vocab


def mesia(comment, code, prob):
    novel = sorted(set(tokenize(comment)) - code_vocab(code))
    if not novel:
        return 0.0, novel
    return sum(-math.log2(prob(t)) for t in novel) / len(novel), novel


def mesia_oracle():
    corpus = (ROOT / "mesia" / "corpus100.txt").read_text().splitlines()
    counts, total, prob = background(corpus)
    triple = json.loads((ROOT / "mesia" / "triple.json").read_text())
    _, _, tprob = background(triple["corpus"])
    triple_values = [mesia(c["comment"], c["code"], tprob)[0] for c in triple["cases"]]
    fx = json.loads((ROOT / "mesia" / "fixture50.json").read_text())
    items = []
    for it in fx["items"]:
        value, novel = mesia(it["comment"], it["code"], prob)
        items.append({"value": value, "novel": novel, "retained": value >= fx["threshold"]})
    values = [i["value"] for i in items]
    retained = [i["value"] for i in items if i["retained"]]
    return {
        "corpus_counts": dict(sorted(counts.items())),
        "corpus_total": total,
        "corpus_vocab": len(counts),
        "triple_values": triple_values,
        "fixture50": items,
        "fixture50_mean": sum(values) / len(values),
        "fixture50_retained": len(retained),
        "fixture50_retained_mean": sum(retained) / len(retained) if retained else 0.0,
    }


def mentions(sentence, identifiers):
    for ident in identifiers:
        if re.search(r"(?<![A-Za-z0-9_$])" + re.escape(ident) + r"(?![A-Za-z0-9_$])", sentence):
            return True
    words = set(tokenize(sentence))
    return any(len(set(fragments(i)) & words) >= 2 for i in identifiers)


def verification_oracle():
    fx = json.loads((ROOT / "verification" / "fixture30.json").read_text())
    exact = fx["identifiers"]["exact"]
    subtokens = sorted({f for i in exact for f in fragments(i)})
    code_vec = embed(" ".join(subtokens))
    targets = [(k, s) for k, s in enumerate(fx["issue_sentences"]) if not s["is_code_block"]]
    target_vecs = [embed(s["text"]) for _, s in targets]
    rows = []
    quad = Counter()
    for sentence in fx["generated"]:
        v = embed(sentence)
        if mentions(sentence, exact):
            relevant, criterion, side = True, "identifier", None
        else:
            side = cosine(v, code_vec)
            relevant, criterion = side > 0.0, ("side" if side > 0.0 else "none")
        sims = [cosine(v, t) for t in target_vecs]
        best = max(sims)
        best_index = targets[sims.index(best)][0]
        verifiable = best > fx["threshold"]
        quad[(relevant, verifiable)] += 1
        rows.append({"relevant": relevant, "criterion": criterion, "side": side,
                     "verifiable": verifiable, "score": best, "best_index": best_index,
                     "retained": relevant and verifiable})
    return {
        "subtokens": subtokens,
        "rows": rows,
        "quadrants": {
            "relevant_verifiable": quad[(True, True)],
            "relevant_unverifiable": quad[(True, False)],
            "irrelevant_verifiable": quad[(False, True)],
            "irrelevant_unverifiable": quad[(False, False)],
        },
    }


def compute():
    return {
        "similarity": similarity_matrix(),
        "overlap": overlap_oracle(),
        "issue_word_length": {"HBASE-24957": word_count()},
        "mesia": mesia_oracle(),
        "verification": verification_oracle(),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true", help="fail if expected.json is stale")
    args = parser.parse_args()
    text = json.dumps(compute(), indent=1, sort_keys=True) + "\n"
    if args.check:
        if not OUT.exists() or OUT.read_text() != text:
            print(f"{OUT} is stale; rerun tests/oracles/oracles.py", file=sys.stderr)
            return 1
        print("oracle values up to date")
        return 0
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(text)
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
