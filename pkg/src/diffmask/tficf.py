"""TF-ICF scoring and diff-set (seed) selection.

A word's score is its relative frequency in the target corpus divided by
its relative frequency in the background table. The top-scoring words
that survive filtering and have an embedding become the seeds.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from diffmask.background import BackgroundTable, relative_freq
from diffmask.corpus_io import Document, _open_text, normalize
from diffmask.embeddings import EmbeddingStore, lookup
from diffmask.errors import DimError, InsufficientSeeds

DEFAULT_K = 20
DEFAULT_MIN_COUNT = 5

DEFAULT_STOPWORDS = frozenset(
    """a about after all also an and any are as at be been but by can could
    did do does for from had has have he her his i if in into is it its may
    more most no not of on or our she should so such than that the their them
    there these they this those to was we were what when which who will with
    would you""".split()
)


@dataclass(frozen=True)
class TficfScore:
    word: str
    corpus_count: int
    corpus_rel_freq: float
    background_rel_freq: float
    score: float


@dataclass(frozen=True)
class Seed:
    word: str
    vector: np.ndarray = field(compare=False)
    score: float = 0.0
    rank: int = 0


@dataclass(frozen=True)
class DiffSet:
    seeds: tuple[Seed, ...]

    def __post_init__(self):
        words = [s.word for s in self.seeds]
        if len(set(words)) != len(words):
            raise ValueError("duplicate seed words")
        if len({s.vector.shape for s in self.seeds}) > 1:
            raise DimError("seed vectors differ in dimension")

    @property
    def k(self) -> int:
        return len(self.seeds)

    @property
    def words(self) -> list[str]:
        return [s.word for s in self.seeds]

    def matrix(self) -> np.ndarray:
        return np.vstack([s.vector for s in self.seeds]).astype(np.float64)

    @classmethod
    def from_vectors(cls, items):
        """Build from ``(word, vector)`` pairs, e.g. for hand-made tests."""
        return cls(
            tuple(
                Seed(w, np.asarray(v, dtype=np.float64), rank=i + 1)
                for i, (w, v) in enumerate(items)
            )
        )


def count_corpus(documents: Iterable[Document]) -> Counter:
    counts: Counter = Counter()
    for doc in documents:
        counts.update(t.normalized for t in doc.tokens)
    return counts


def tficf_scores(
    corpus_counts: Mapping[str, int], background: BackgroundTable
) -> list[TficfScore]:
    """Score every corpus word; highest score first, ties by word."""
    total = sum(corpus_counts.values())
    if total <= 0:
        raise ValueError("corpus_counts is empty")
    out = []
    for word, count in corpus_counts.items():
        if count <= 0:
            continue
        crf = count / total
        brf = relative_freq(background, word)
        out.append(TficfScore(word, count, crf, brf, crf / brf))
    out.sort(key=lambda s: (-s.score, s.word))
    return out


def load_stopwords(path) -> frozenset:
    with _open_text(path) as fh:
        words = {normalize(line) for line in fh if not line.startswith("#")}
    words.discard("")
    return frozenset(words)


def select_seeds(
    scores: Sequence[TficfScore],
    k: int,
    store: EmbeddingStore,
    stopwords: Optional[Iterable[str]] = None,
    min_count: int = DEFAULT_MIN_COUNT,
) -> DiffSet:
    """Walk the ranking and keep the first ``k`` eligible words.

    A word is eligible when it is not a stopword, occurs at least
    ``min_count`` times in the corpus, and has an embedding.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    stop = DEFAULT_STOPWORDS if stopwords is None else frozenset(stopwords)
    seeds = []
    for rank, s in enumerate(scores, 1):
        if s.word in stop or s.corpus_count < min_count:
            continue
        vec = lookup(store, s.word)
        if vec is None:
            continue
        seeds.append(Seed(s.word, vec, s.score, rank))
        if len(seeds) == k:
            return DiffSet(tuple(seeds))
    raise InsufficientSeeds(len(seeds), k)
