"""Regenerate the test fixtures under tests/fixtures/.

The planted-domain corpus mixes 100 generic sentences with 20 sentences
salted with five invented domain words. Every generic word is in the
background table with a large count; the invented words are absent, so
their TF-ICF scores sit many orders of magnitude above everything else.

Usage: python scripts/make_fixtures.py [outdir]
"""
import json
import sys
from pathlib import Path

import numpy as np

PLANTED = ["zorbitase", "kelvaminol", "prestocyte", "vantrelin", "quoraxide"]

# (word, background count); counts are in the range of real web unigram counts
GENERIC = [
    ("the", 23135851162), ("of", 13151942776), ("and", 12997637966),
    ("to", 12136980858), ("a", 9081174698), ("in", 8469404971),
    ("is", 4705743816), ("on", 4083538876), ("that", 3400031103),
    ("with", 3025777628), ("was", 2541567613), ("for", 5933321709),
    ("we", 1543285713), ("study", 298767045), ("results", 354870314),
    ("data", 1088498447), ("model", 402342340), ("method", 160016862),
    ("analysis", 239891463), ("group", 377364567), ("sample", 150298520),
    ("effect", 124523143), ("level", 313285473), ("time", 1334256577),
    ("used", 594542016), ("shows", 121403112), ("high", 544513547),
    ("low", 254310431), ("new", 1551258643), ("large", 277373924),
    ("small", 354829862), ("different", 279398283), ("first", 578161543),
    ("observed", 38478919), ("measured", 33479418), ("increase", 90898339),
    ("response", 137856745), ("cells", 42003592), ("protein", 56780291),
    ("activity", 116513592), ("binding", 22731958), ("treatment", 131286497),
    ("patients", 78954932), ("control", 267032149), ("factor", 65239817),
]
EMBEDDED_GENERIC = 45  # all generic words get vectors: 45 + 5 planted = 50

TEMPLATES_GENERIC = 100
TEMPLATES_SALTED = 20


def sentence(rng, words, n):
    picks = [words[i] for i in rng.integers(0, len(words), size=n)]
    picks[0] = picks[0].capitalize()
    return " ".join(picks) + "."


def make_corpus(rng):
    words = [w for w, _ in GENERIC]
    lines = [sentence(rng, words, int(rng.integers(8, 13))) for _ in range(TEMPLATES_GENERIC)]
    for j in range(TEMPLATES_SALTED):
        base = sentence(rng, words, int(rng.integers(7, 11))).rstrip(".").split()
        # two planted words per salted sentence: each planted word occurs 8 times
        for p in (PLANTED[j % 5], PLANTED[(j + 2) % 5]):
            base.insert(int(rng.integers(1, len(base) + 1)), p)
        lines.append(" ".join(base) + ".")
    order = rng.permutation(len(lines))
    return [lines[i] for i in order]


def make_embeddings(rng, dim=8):
    domain = np.zeros(dim)
    domain[0] = 1.0
    rows = []
    for w in PLANTED:
        v = 2.0 * domain + 0.3 * rng.standard_normal(dim)
        rows.append((w, v))
    for w, _ in GENERIC[:EMBEDDED_GENERIC]:
        v = rng.standard_normal(dim)
        rows.append((w, v))
    return rows


def fmt_vec(v):
    return " ".join(f"{x:.4f}" for x in v)


def main(outdir):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20231015)

    corpus = make_corpus(rng)
    (out / "planted_corpus.txt").write_text("\n".join(corpus) + "\n", encoding="utf-8")

    # a short corpus for the exact TF-ICF oracle check (<= 200 words)
    small, count = [], 0
    for line in corpus:
        n = len(line.split())
        if count + n > 200:
            break
        small.append(line)
        count += n
    (out / "tficf_small.txt").write_text("\n".join(small) + "\n", encoding="utf-8")

    bg = ["# word\tcount (web-scale unigram counts; planted words deliberately absent)"]
    bg += [f"{w}\t{c}" for w, c in GENERIC]
    (out / "background.tsv").write_text("\n".join(bg) + "\n", encoding="utf-8")

    emb = make_embeddings(rng)
    lines = [f"{len(emb)} 8"] + [f"{w} {fmt_vec(v)}" for w, v in emb]
    (out / "embeddings.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # pretokenized: two subword-grouped text docs and two "video" docs with inline vectors
    recs = [
        {
            "id": "sub-0",
            "tokens": ["The", "zorbit", "##ase", "binds", "kelva", "##minol", "."],
            "groups": [
                {"members": [0], "label": "the"},
                {"members": [1, 2], "label": "zorbitase"},
                {"members": [3], "label": "binds"},
                {"members": [4, 5], "label": "kelvaminol"},
                {"members": [6]},
            ],
        },
        {
            "id": "sub-1",
            "tokens": ["pre", "##sto", "##cyte", "activity", "was", "measured"],
            "groups": [
                {"members": [0, 1, 2], "label": "prestocyte"},
                {"members": [3], "label": "activity"},
                {"members": [4], "label": "was"},
                {"members": [5], "label": "measured"},
            ],
        },
    ]
    person = np.array([1.0, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    for vid in range(2):
        vecs, groups, idx = [], [], 0
        for gi, (label, size) in enumerate([("person", 4), ("object", 3), ("person", 2), ("object", 3)]):
            members = list(range(idx, idx + size))
            idx += size
            base = person if label == "person" else rng.standard_normal(8)
            for _ in members:
                vecs.append([round(float(x), 4) for x in base + 0.1 * rng.standard_normal(8)])
            groups.append({"members": members, "label": label})
        recs.append(
            {
                "id": f"video-{vid}",
                "tokens": [f"patch{i}" for i in range(idx)],
                "groups": groups,
                "vectors": vecs,
            }
        )
    with open(out / "pretokenized.jsonl", "w", encoding="utf-8") as fh:
        for r in recs:
            fh.write(json.dumps(r) + "\n")

    # attention scores and entity spans for the pretokenized docs
    with open(out / "attention.jsonl", "w", encoding="utf-8") as fh:
        for r in recs:
            n = len(r["tokens"])
            scores = [round(float(x), 4) for x in rng.uniform(0.0, 1.0, size=n)]
            fh.write(json.dumps({"id": r["id"], "scores": scores}) + "\n")
    with open(out / "spans.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"id": "sub-0", "spans": [[1, 3], [4, 6]]}) + "\n")
        fh.write(json.dumps({"id": "sub-1", "spans": [[0, 3]]}) + "\n")
        fh.write(json.dumps({"id": "video-0", "spans": [[0, 4], [7, 9]]}) + "\n")
        fh.write(json.dumps({"id": "video-1", "spans": []}) + "\n")

    (out / "vocab.txt").write_text("\n".join(w for w, _ in GENERIC[:20]) + "\n", encoding="utf-8")
    (out / "pipeline.cfg").write_text(
        "# fixture pipeline settings (paths relative to this directory)\n"
        "corpus=planted_corpus.txt\n"
        "background=background.tsv\n"
        "embeddings=embeddings.txt\n"
        "rng_seed=0\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "tests" / "fixtures")
