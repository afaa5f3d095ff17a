"""Run configuration: flat ``key=value`` files, flags on top, defaults below.

Precedence is flag > config file > default for every field.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Mapping, Optional

from diffmask.corpus_io import _open_text
from diffmask.errors import ConfigError
from diffmask.masker import DEFAULT_CLAMP_EPSILON, DEFAULT_RATIO, Replacement, Strategy
from diffmask.tficf import DEFAULT_K, DEFAULT_MIN_COUNT

PATH_FIELDS = (
    "corpus",
    "background",
    "embeddings",
    "stopwords",
    "attention",
    "spans",
    "vocab",
    "seeds",
    "plans",
    "dists",
    "out",
)


@dataclass(frozen=True)
class RunConfig:
    corpus: Optional[str] = None
    background: Optional[str] = None
    embeddings: Optional[str] = None
    stopwords: Optional[str] = None
    attention: Optional[str] = None
    spans: Optional[str] = None
    vocab: Optional[str] = None
    seeds: Optional[str] = None
    plans: Optional[str] = None
    dists: Optional[str] = None
    out: Optional[str] = None
    k: int = DEFAULT_K
    ratio: float = DEFAULT_RATIO
    strategy: Strategy = Strategy.DIFFERENCE_NN
    rng_seed: int = 0
    clamp_epsilon: float = DEFAULT_CLAMP_EPSILON
    floor_count: int = 1
    min_count: int = DEFAULT_MIN_COUNT
    replacement: Replacement = Replacement.SENTINEL
    group_aggregation: str = "max"
    label: Optional[str] = None
    top: int = 40

    def provenance(self) -> dict:
        """Resolved settings for output headers (output location excluded)."""
        d = asdict(self)
        d.pop("out")
        d["strategy"] = self.strategy.value
        d["replacement"] = self.replacement.value
        return d


FIELD_NAMES = tuple(f.name for f in fields(RunConfig))


def _as_int(v):
    if isinstance(v, bool):
        raise ValueError
    if isinstance(v, int):
        return v
    return int(str(v).strip(), 0)


def _as_float(v):
    if isinstance(v, bool):
        raise ValueError
    return float(v)


def validate_config(raw: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Build a ``RunConfig`` from raw key/value input.

    Keys may use ``-`` or ``_``. Every problem is collected and reported
    together in one ``ConfigError``.
    """
    raw = dict(raw or {})
    errors = []
    values: dict[str, Any] = {}
    for key, value in raw.items():
        name = key.strip().replace("-", "_")
        if name not in FIELD_NAMES:
            errors.append(f"unknown key {key!r}")
            continue
        if value is None:
            continue
        values[name] = value

    out: dict[str, Any] = {}
    for name in PATH_FIELDS + ("label",):
        if name in values:
            out[name] = str(values[name])

    def conv(name, fn, check, message):
        if name not in values:
            return
        try:
            val = fn(values[name])
        except (TypeError, ValueError):
            errors.append(f"{name} must be a number, got {values[name]!r}")
            return
        if not check(val):
            errors.append(message)
            return
        out[name] = val

    conv("k", _as_int, lambda v: v >= 1, "k must be >= 1")
    conv("ratio", _as_float, lambda v: 0.0 < v < 1.0, "ratio out of range (0, 1)")
    conv("rng_seed", _as_int, lambda v: -(1 << 63) <= v < (1 << 64), "rng_seed must fit in 64 bits")
    conv("clamp_epsilon", _as_float, lambda v: v > 0.0, "clamp_epsilon must be > 0")
    conv("floor_count", _as_int, lambda v: v >= 1, "floor_count must be >= 1")
    conv("min_count", _as_int, lambda v: v >= 1, "min_count must be >= 1")
    conv("top", _as_int, lambda v: v >= 1, "top must be >= 1")

    for name, parser in (("strategy", Strategy.parse), ("replacement", Replacement.parse)):
        if name in values:
            try:
                out[name] = parser(values[name])
            except ValueError as exc:
                errors.append(str(exc))
    if "group_aggregation" in values:
        agg = str(values["group_aggregation"]).strip().lower()
        if agg in ("max", "mean"):
            out["group_aggregation"] = agg
        else:
            errors.append("group_aggregation must be 'max' or 'mean'")

    if errors:
        raise ConfigError(errors)
    return RunConfig(**out)


def read_config_file(path) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments ignored."""
    raw: dict[str, str] = {}
    errors = []
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                errors.append(f"{path}:{lineno}: expected key=value")
                continue
            raw[key.strip()] = value.strip()
    if errors:
        raise ConfigError(errors)
    return raw


def resolve_config(file_path=None, flags: Optional[Mapping[str, Any]] = None) -> RunConfig:
    merged: dict[str, Any] = {}
    if file_path is not None:
        merged.update(read_config_file(file_path))
    for key, value in (flags or {}).items():
        if value is not None:
            merged[key] = value
    return validate_config(merged)
