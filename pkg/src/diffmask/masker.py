"""Per-token mask distributions and group-atomic mask plans.

Strategies:

``difference_nn``
    raw score = cosine to the nearest seed embedding.
``difference_centroid``
    raw score = cosine to the mean seed embedding (ablation).
``random``
    uniform ``1/N``.
``attention``
    proportional to externally computed attention scores.
``entity``
    proportional to span membership (tokens inside recognized entities).

Raw similarity scores are clamped below at ``clamp_epsilon`` and then
normalized over the document, so negative or zero similarities stay
maskable with negligible probability.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from diffmask import kernels
from diffmask.corpus_io import Document
from diffmask.embeddings import EmbeddingStore, lookup
from diffmask.errors import (
    DegenerateAttention,
    DimError,
    LengthError,
    NoSeeds,
    NoVocabulary,
    SpanError,
)
from diffmask.rng import doc_stream
from diffmask.tficf import DiffSet

logger = logging.getLogger(__name__)

DEFAULT_RATIO = 0.25
DEFAULT_CLAMP_EPSILON = 1e-6
MASK_TOKEN = "[MASK]"


class Strategy(str, Enum):
    DIFFERENCE_NN = "difference_nn"
    DIFFERENCE_CENTROID = "difference_centroid"
    RANDOM = "random"
    ATTENTION = "attention"
    ENTITY = "entity"

    @classmethod
    def parse(cls, name) -> "Strategy":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower().replace("-", "_"))
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown strategy {name!r} (choose from {choices})") from None


class Replacement(str, Enum):
    SENTINEL = "sentinel"
    RANDOM_TOKEN = "random_token"

    @classmethod
    def parse(cls, name) -> "Replacement":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower().replace("-", "_"))
        except ValueError:
            raise ValueError(
                f"unknown replacement {name!r} (choose from sentinel, random-token)"
            ) from None


@dataclass(frozen=True)
class StrategyConfig:
    strategy: Strategy = Strategy.DIFFERENCE_NN
    ratio: float = DEFAULT_RATIO
    clamp_epsilon: float = DEFAULT_CLAMP_EPSILON
    rng_seed: int = 0
    group_aggregation: str = "max"
    replacement: Replacement = Replacement.SENTINEL

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        object.__setattr__(self, "replacement", Replacement.parse(self.replacement))
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio out of range (0, 1)")
        if not self.clamp_epsilon > 0.0:
            raise ValueError("clamp_epsilon must be > 0")
        if self.group_aggregation not in ("max", "mean"):
            raise ValueError("group_aggregation must be 'max' or 'mean'")


@dataclass(frozen=True)
class MaskDistribution:
    doc_id: str
    probs: np.ndarray
    strategy: Strategy
    # seed index per token, -1 where undefined (OOV); None for non-NN strategies
    argmax_seed: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.probs)

    def argmax_list(self) -> list:
        if self.argmax_seed is None:
            return [None] * len(self.probs)
        return [None if a < 0 else int(a) for a in self.argmax_seed]


@dataclass(frozen=True)
class MaskPlan:
    doc_id: str
    masked_token_indices: tuple[int, ...]
    masked_group_indices: tuple[int, ...]
    ratio: float
    rng_seed: int
    replacement: Replacement = Replacement.SENTINEL
    strategy: Optional[Strategy] = field(default=None, compare=False)


def _normalize(raw: np.ndarray, clamp_epsilon: float) -> np.ndarray:
    clamped = np.maximum(raw, clamp_epsilon)
    return clamped / clamped.sum()


def token_vectors(doc: Document, store: Optional[EmbeddingStore], dim: int):
    """Token embedding matrix plus a boolean mask of tokens that have one.

    Inline vectors win over the store; tokens with neither are OOV.
    """
    n = len(doc)
    mat = np.zeros((n, dim), dtype=np.float64)
    found = np.zeros(n, dtype=bool)
    for i, tok in enumerate(doc.tokens):
        vec = tok.inline_vector
        if vec is None and store is not None:
            vec = lookup(store, tok.normalized)
        if vec is None:
            continue
        if vec.shape != (dim,):
            raise DimError(
                f"document {doc.id!r} token {i}: vector dim {vec.shape[0]} != seed dim {dim}"
            )
        mat[i] = vec
        found[i] = True
    return mat, found


def _seed_matrix(diffset: DiffSet) -> np.ndarray:
    if diffset is None or diffset.k == 0:
        raise NoSeeds("diff-set is empty")
    return diffset.matrix()


def score_difference_nn(
    doc: Document,
    diffset: DiffSet,
    store: Optional[EmbeddingStore],
    clamp_epsilon: float = DEFAULT_CLAMP_EPSILON,
) -> MaskDistribution:
    seeds = _seed_matrix(diffset)
    mat, found = token_vectors(doc, store, seeds.shape[1])
    raw = np.full(len(doc), clamp_epsilon)
    arg = np.full(len(doc), -1, dtype=np.int64)
    if found.any():
        best, which = kernels.nearest_seed(mat[found], seeds)
        raw[found] = best
        arg[found] = which
    return MaskDistribution(
        doc.id, _normalize(raw, clamp_epsilon), Strategy.DIFFERENCE_NN, arg
    )


def score_centroid(
    doc: Document,
    diffset: DiffSet,
    store: Optional[EmbeddingStore],
    clamp_epsilon: float = DEFAULT_CLAMP_EPSILON,
) -> MaskDistribution:
    seeds = _seed_matrix(diffset)
    centroid = seeds.sum(axis=0) / seeds.shape[0]
    mat, found = token_vectors(doc, store, seeds.shape[1])
    raw = np.full(len(doc), clamp_epsilon)
    if found.any():
        # a zero centroid yields cosine 0 everywhere, i.e. uniform after clamping
        best, _ = kernels.nearest_seed(mat[found], centroid[None, :])
        raw[found] = best
    return MaskDistribution(
        doc.id, _normalize(raw, clamp_epsilon), Strategy.DIFFERENCE_CENTROID
    )


def score_random(doc: Document) -> MaskDistribution:
    n = len(doc)
    return MaskDistribution(doc.id, np.full(n, 1.0 / n), Strategy.RANDOM)


def score_attention(doc: Document, attention_scores) -> MaskDistribution:
    scores = np.asarray(attention_scores, dtype=np.float64)
    if scores.ndim != 1 or scores.shape[0] != len(doc):
        raise LengthError(
            f"document {doc.id!r}: {scores.size} attention scores for {len(doc)} tokens"
        )
    if not np.all(np.isfinite(scores)) or np.any(scores < 0):
        raise DegenerateAttention(f"document {doc.id!r}: scores must be finite and >= 0")
    total = scores.sum()
    if total <= 0:
        raise DegenerateAttention(f"document {doc.id!r}: all attention scores are zero")
    return MaskDistribution(doc.id, scores / total, Strategy.ATTENTION)


def score_entity_spans(
    doc: Document,
    spans: Sequence[Sequence[int]],
    in_weight: float = 1.0,
    out_weight: float = 0.0,
    clamp_epsilon: float = DEFAULT_CLAMP_EPSILON,
) -> MaskDistribution:
    """Weight tokens by entity-span membership, ``[start, end)`` ranges."""
    if not in_weight > 0 or out_weight < 0:
        raise ValueError("need in_weight > 0 and out_weight >= 0")
    n = len(doc)
    inside = np.zeros(n, dtype=bool)
    for span in spans:
        if len(span) != 2:
            raise SpanError(f"document {doc.id!r}: span {span!r} is not a pair")
        start, end = int(span[0]), int(span[1])
        if not 0 <= start < end <= n:
            raise SpanError(f"document {doc.id!r}: span [{start}, {end}) outside [0, {n})")
        inside[start:end] = True
    weights = np.where(inside, in_weight, out_weight).astype(np.float64)
    return MaskDistribution(doc.id, _normalize(weights, clamp_epsilon), Strategy.ENTITY)


def group_weights(dist: MaskDistribution, doc: Document, aggregation: str = "max") -> np.ndarray:
    if len(dist) != len(doc):
        raise LengthError(f"distribution has {len(dist)} entries, document {len(doc)}")
    reduce = np.max if aggregation == "max" else np.mean
    return np.array([reduce(dist.probs[list(g.members)]) for g in doc.groups])


def mask_budget(ratio: float, n: int) -> int:
    """``ceil(ratio * n)``, rounded first so 0.1 * 30 gives 3 and not 4."""
    return max(1, math.ceil(round(ratio * n, 9)))


def _draw_uniforms(rng: np.random.Generator, n_groups: int) -> np.ndarray:
    return rng.random(n_groups)


def sample_plan(dist: MaskDistribution, doc: Document, config: StrategyConfig) -> MaskPlan:
    """Draw groups without replacement, proportional to group weight,
    until at least ``ceil(ratio * N)`` tokens are covered."""
    weights = group_weights(dist, doc, config.group_aggregation)
    sizes = np.asarray(doc.group_sizes(), dtype=np.int64)
    budget = mask_budget(config.ratio, len(doc))
    rng = doc_stream(config.rng_seed, doc.id)
    drawn = kernels.weighted_draw(weights, sizes, budget, _draw_uniforms(rng, len(sizes)))
    if len(doc.groups) == 1:
        logger.warning("document %r is a single group; masking all of it", doc.id)
    groups = tuple(sorted(drawn))
    tokens = tuple(sorted(m for g in groups for m in doc.groups[g].members))
    return MaskPlan(
        doc.id, tokens, groups, config.ratio, config.rng_seed, config.replacement, dist.strategy
    )


def apply_plan(doc: Document, plan: MaskPlan, vocabulary: Sequence[str] = ()) -> list[str]:
    """Return the document's token texts with masked positions replaced.

    ``random_token`` replacements come from the plan's own stream, continued
    after the draws that produced the plan, so each plan has exactly one
    realization.
    """
    if plan.doc_id != doc.id:
        raise ValueError(f"plan for {plan.doc_id!r} applied to document {doc.id!r}")
    out = [t.text for t in doc.tokens]
    if not plan.masked_token_indices:
        return out
    if plan.replacement is Replacement.SENTINEL:
        for i in plan.masked_token_indices:
            out[i] = MASK_TOKEN
        return out
    if not vocabulary:
        raise NoVocabulary("random_token replacement needs a nonempty vocabulary")
    rng = doc_stream(plan.rng_seed, doc.id)
    _draw_uniforms(rng, len(doc.groups))
    picks = rng.integers(0, len(vocabulary), size=len(plan.masked_token_indices))
    for i, p in zip(plan.masked_token_indices, picks):
        out[i] = vocabulary[p]
    return out


def score_document(
    doc: Document,
    config: StrategyConfig,
    diffset: Optional[DiffSet] = None,
    store: Optional[EmbeddingStore] = None,
    attention=None,
    spans=None,
) -> MaskDistribution:
    """Dispatch on ``config.strategy``."""
    s = config.strategy
    if s is Strategy.DIFFERENCE_NN:
        return score_difference_nn(doc, diffset, store, config.clamp_epsilon)
    if s is Strategy.DIFFERENCE_CENTROID:
        return score_centroid(doc, diffset, store, config.clamp_epsilon)
    if s is Strategy.RANDOM:
        return score_random(doc)
    if s is Strategy.ATTENTION:
        if attention is None:
            raise DegenerateAttention(f"no attention scores for document {doc.id!r}")
        return score_attention(doc, attention)
    return score_entity_spans(doc, spans or (), clamp_epsilon=config.clamp_epsilon)


def plan_document(doc, config, diffset=None, store=None, attention=None, spans=None):
    dist = score_document(doc, config, diffset, store, attention, spans)
    return dist, sample_plan(dist, doc, config)
