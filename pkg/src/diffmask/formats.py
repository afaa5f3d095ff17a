"""Readers and writers for the on-disk artifacts.

Every JSON Lines output starts with a ``{"_meta": {...}}`` record carrying
the resolved run configuration; readers skip it. JSON outputs carry the
same block under ``"meta"``.
"""
from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from diffmask.corpus_io import _open_text
from diffmask.errors import DataError, EmptyPlans
from diffmask.masker import MaskDistribution, MaskPlan, Replacement, Strategy
from diffmask.tficf import DiffSet, Seed, TficfScore

META_KEY = "_meta"
PROB_DECIMALS = 9


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, allow_nan=False)


def _iter_jsonl(path):
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict):
                raise DataError(f"{path}:{lineno}: record must be an object")
            if META_KEY in rec:
                continue
            yield lineno, rec


def read_meta(path) -> dict:
    """Return the ``_meta`` block of a JSON Lines artifact (empty if absent)."""
    with _open_text(path) as fh:
        first = fh.readline()
    try:
        rec = json.loads(first) if first.strip() else {}
    except json.JSONDecodeError:
        return {}
    return rec.get(META_KEY, {}) if isinstance(rec, dict) else {}


# seeds

def write_seeds(path, scores: Sequence[TficfScore], diffset: DiffSet, meta: dict) -> None:
    doc = {
        "meta": meta,
        "k": diffset.k,
        "seeds": [
            {
                "rank": s.rank,
                "word": s.word,
                "score": s.score,
                "vector": [float(x) for x in s.vector],
            }
            for s in diffset.seeds
        ],
        "scores": [
            {"rank": r, "word": s.word, "score": s.score, "corpus_count": s.corpus_count}
            for r, s in enumerate(scores, 1)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, ensure_ascii=False, indent=1, allow_nan=False))
        fh.write("\n")


def read_seeds(path) -> DiffSet:
    with _open_text(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc.msg})") from exc
    try:
        seeds = tuple(
            Seed(
                s["word"],
                np.asarray(s["vector"], dtype=np.float64),
                float(s.get("score", 0.0)),
                int(s.get("rank", i + 1)),
            )
            for i, s in enumerate(doc["seeds"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed seed list ({exc})") from exc
    return DiffSet(seeds)


# plans

def plan_record(dist: MaskDistribution, plan: MaskPlan) -> dict:
    argmax = dist.argmax_list() if dist.argmax_seed is not None else [None] * len(dist)
    return {
        "id": plan.doc_id,
        "strategy": dist.strategy.value,
        "ratio": plan.ratio,
        "rng_seed": plan.rng_seed,
        "probs": [round(float(p), PROB_DECIMALS) for p in dist.probs],
        "argmax_seed": argmax,
        "masked_tokens": list(plan.masked_token_indices),
        "masked_groups": list(plan.masked_group_indices),
    }


def write_plans(path, results: Iterable[tuple[MaskDistribution, MaskPlan]], meta: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps({META_KEY: meta}) + "\n")
        for dist, plan in results:
            fh.write(_dumps(plan_record(dist, plan)) + "\n")


def read_plans(path) -> list[tuple[MaskDistribution, MaskPlan]]:
    out = []
    for lineno, rec in _iter_jsonl(path):
        try:
            strategy = Strategy.parse(rec["strategy"])
            argmax = rec.get("argmax_seed")
            arg = None
            if strategy is Strategy.DIFFERENCE_NN and argmax is not None:
                arg = np.array([-1 if a is None else int(a) for a in argmax], dtype=np.int64)
            dist = MaskDistribution(
                str(rec["id"]), np.asarray(rec["probs"], dtype=np.float64), strategy, arg
            )
            plan = MaskPlan(
                str(rec["id"]),
                tuple(int(i) for i in rec["masked_tokens"]),
                tuple(int(g) for g in rec["masked_groups"]),
                float(rec["ratio"]),
                int(rec["rng_seed"]),
                Replacement.SENTINEL,
                strategy,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}:{lineno}: malformed plan record ({exc})") from exc
        out.append((dist, plan))
    if not out:
        raise EmptyPlans(f"{path} contains no plans")
    return out


# external per-document inputs

def read_attention(path) -> dict[str, list[float]]:
    out = {}
    for lineno, rec in _iter_jsonl(path):
        if "id" not in rec or not isinstance(rec.get("scores"), list):
            raise DataError(f"{path}:{lineno}: need 'id' and 'scores'")
        out[str(rec["id"])] = rec["scores"]
    return out


def read_spans(path) -> dict[str, list[list[int]]]:
    out = {}
    for lineno, rec in _iter_jsonl(path):
        if "id" not in rec or not isinstance(rec.get("spans"), list):
            raise DataError(f"{path}:{lineno}: need 'id' and 'spans'")
        out[str(rec["id"])] = rec["spans"]
    return out


def read_vocab(path) -> list[str]:
    with _open_text(path) as fh:
        words = [line.strip() for line in fh]
    return [w for w in words if w and not w.startswith("#")]


def corpus_vocabulary(documents) -> list[str]:
    return sorted({t.normalized for d in documents for t in d.tokens})


def write_masked(path, rows: Iterable[tuple[str, list[str], Sequence[int]]], meta: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps({META_KEY: meta}) + "\n")
        for doc_id, tokens, masked in rows:
            fh.write(_dumps({"id": doc_id, "tokens": tokens, "masked_tokens": list(masked)}) + "\n")


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, ensure_ascii=False, indent=1, allow_nan=False))
        fh.write("\n")

