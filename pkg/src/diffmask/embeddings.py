"""Static word-embedding store (word2vec/GloVe text format) and cosine."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from diffmask import kernels
from diffmask.corpus_io import _open_text
from diffmask.errors import DimError, EmptyEmbeddings, IoError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingStore:
    dim: int
    vectors: dict[str, np.ndarray]
    warnings: int = field(default=0, compare=False)

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, word):
        return word in self.vectors

    @classmethod
    def from_dict(cls, vectors):
        arrs = {w: np.asarray(v, dtype=np.float64) for w, v in vectors.items()}
        dims = {a.shape for a in arrs.values()}
        if len(dims) != 1:
            raise DimError(f"inconsistent vector shapes {sorted(dims)}")
        (shape,) = dims
        if len(shape) != 1 or not all(np.all(np.isfinite(a)) for a in arrs.values()):
            raise DimError("vectors must be finite 1-d arrays")
        return cls(shape[0], arrs)


def _parse_floats(parts):
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        return None
    return vals


def load_embeddings(path) -> EmbeddingStore:
    """Load ``word v1 ... vd`` lines with an optional ``vocab dim`` header.

    Bad lines (wrong arity, unparsable, non-finite) are skipped with a
    warning. The first occurrence of a word wins.
    """
    vectors: dict[str, np.ndarray] = {}
    dim: Optional[int] = None
    warnings = 0
    first = True
    with _open_text(path) as fh:
        try:
            for lineno, raw in enumerate(fh, 1):
                parts = raw.split()
                if not parts:
                    continue
                if first:
                    first = False
                    if len(parts) == 2 and all(p.isdigit() for p in parts):
                        dim = int(parts[1])
                        continue
                word, vals = parts[0], _parse_floats(parts[1:])
                if vals is None or not vals:
                    warnings += 1
                    logger.warning("%s:%d: unparsable vector, skipped", path, lineno)
                    continue
                if dim is None:
                    dim = len(vals)
                if len(vals) != dim:
                    warnings += 1
                    logger.warning(
                        "%s:%d: %d values, expected %d; skipped", path, lineno, len(vals), dim
                    )
                    continue
                if not all(math.isfinite(v) for v in vals):
                    warnings += 1
                    logger.warning("%s:%d: non-finite value, skipped", path, lineno)
                    continue
                if word in vectors:
                    warnings += 1
                    logger.warning("%s:%d: duplicate word %r, first wins", path, lineno, word)
                    continue
                arr = np.asarray(vals, dtype=np.float64)
                arr.setflags(write=False)
                vectors[word] = arr
        except UnicodeDecodeError as exc:
            raise IoError(f"{path} is not valid UTF-8: {exc}") from exc
    if not vectors:
        raise EmptyEmbeddings(f"{path} has no valid vectors")
    return EmbeddingStore(dim, vectors, warnings)


def lookup(store: EmbeddingStore, word: str) -> Optional[np.ndarray]:
    return store.vectors.get(word)


def cosine(u, v) -> float:
    """Cosine similarity; 0.0 when either vector is all zeros."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or u.shape != v.shape:
        raise DimError(f"dimension mismatch: {u.shape} vs {v.shape}")
    best, _ = kernels.nearest_seed(u[None, :], v[None, :])
    return float(best[0])
