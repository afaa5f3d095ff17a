"""Diagnostics over mask plans: what got masked, which seeds drove it,
how spread out the seeds are, and how much masking fell on a group label."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from diffmask.corpus_io import Document
from diffmask.errors import (
    DegenerateSeries,
    EmptyPlans,
    NotNearestNeighbor,
    UnknownDocument,
)
from diffmask.masker import MaskDistribution, MaskPlan
from diffmask.tficf import DiffSet


def _ranked(counter: Counter) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(counter.items(), key=lambda kv: (-kv[1], kv[0])))


@dataclass(frozen=True)
class MaskHistogram:
    entries: tuple[tuple[str, int], ...]

    @property
    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def top(self, n: int):
        return self.entries[:n]


@dataclass(frozen=True)
class SeedUsage:
    entries: tuple[tuple[str, int], ...]

    @property
    def total(self) -> int:
        return sum(c for _, c in self.entries)


@dataclass(frozen=True)
class VarianceReport:
    k: int
    variance: float


def _index(documents) -> Mapping[str, Document]:
    if isinstance(documents, Mapping):
        return documents
    return {d.id: d for d in documents}


def masked_word_histogram(
    plans: Iterable[MaskPlan], documents: Sequence[Document] | Mapping[str, Document]
) -> MaskHistogram:
    docs = _index(documents)
    counts: Counter = Counter()
    for plan in plans:
        doc = docs.get(plan.doc_id)
        if doc is None:
            raise UnknownDocument(f"plan references unknown document {plan.doc_id!r}")
        counts.update(doc.tokens[i].normalized for i in plan.masked_token_indices)
    return MaskHistogram(_ranked(counts))


def chosen_seed_histogram(
    distributions: Iterable[MaskDistribution],
    plans: Iterable[MaskPlan],
    seed_words: Sequence[str],
) -> SeedUsage:
    """Count, per seed, how many masked tokens had it as nearest seed."""
    by_id = {d.doc_id: d for d in distributions}
    counts: Counter = Counter()
    for plan in plans:
        dist = by_id.get(plan.doc_id)
        if dist is None:
            raise UnknownDocument(f"no distribution for document {plan.doc_id!r}")
        if dist.argmax_seed is None:
            raise NotNearestNeighbor(
                f"document {plan.doc_id!r}: strategy {dist.strategy.value} has no nearest seeds"
            )
        for i in plan.masked_token_indices:
            a = int(dist.argmax_seed[i])
            if a >= 0:
                counts[seed_words[a]] += 1
    return SeedUsage(_ranked(counts))


def seed_embedding_variance(diffset: DiffSet) -> VarianceReport:
    """Mean squared distance of the seed vectors from their centroid."""
    m = diffset.matrix()
    centroid = m.mean(axis=0)
    variance = float(np.mean(np.sum((m - centroid) ** 2, axis=1)))
    return VarianceReport(diffset.k, variance)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) != len(ys):
        raise ValueError("series differ in length")
    if len(xs) < 2:
        raise DegenerateSeries("need at least two points")
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSeries("constant series")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def masked_group_label_fraction(
    plans: Iterable[MaskPlan],
    documents: Sequence[Document] | Mapping[str, Document],
    label: str,
) -> float:
    """Fraction of masked tokens whose group carries ``label``."""
    docs = _index(documents)
    hits = total = 0
    for plan in plans:
        doc = docs.get(plan.doc_id)
        if doc is None:
            raise UnknownDocument(f"plan references unknown document {plan.doc_id!r}")
        for i in plan.masked_token_indices:
            total += 1
            if doc.groups[doc.tokens[i].group_index].label == label:
                hits += 1
    if total == 0:
        raise EmptyPlans("no masked tokens")
    return hits / total
