"""General-domain unigram table (e.g. Web 1T counts) used as the
reference distribution for TF-ICF."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from diffmask.corpus_io import _open_text, normalize
from diffmask.errors import EmptyBackground, IoError, ParseError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BackgroundTable:
    counts: dict[str, int]
    total: int
    floor_count: int = 1
    warnings: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.floor_count < 1:
            raise ValueError("floor_count must be >= 1")
        if self.total != sum(self.counts.values()):
            raise ValueError("total does not match the sum of counts")

    @classmethod
    def from_counts(cls, counts, floor_count=1):
        counts = dict(counts)
        return cls(counts, sum(counts.values()), floor_count)

    def __contains__(self, word):
        return word in self.counts


def load_background(path, floor_count: int = 1) -> BackgroundTable:
    """Read ``word<TAB>count`` lines; ``#`` starts a comment line.

    Words are normalized like corpus tokens. A repeated word keeps its last
    count and logs a warning.
    """
    if floor_count < 1:
        raise ValueError("floor_count must be >= 1")
    counts: dict[str, int] = {}
    warnings = 0
    with _open_text(path) as fh:
        try:
            for lineno, raw in enumerate(fh, 1):
                line = raw.rstrip("\r\n")
                if not line.strip() or line.startswith("#"):
                    continue
                word, sep, count_text = line.partition("\t")
                if not sep:
                    raise ParseError(lineno, "missing tab")
                count_text = count_text.strip()
                if not count_text.isdigit() or not count_text.isascii():
                    raise ParseError(lineno, f"count {count_text!r} is not an integer")
                count = int(count_text)
                if count < 1:
                    raise ParseError(lineno, "count must be >= 1")
                norm = normalize(word)
                if not norm:
                    warnings += 1
                    logger.warning("%s:%d: word %r normalizes to empty, skipped", path, lineno, word)
                    continue
                if norm in counts:
                    warnings += 1
                    logger.warning("%s:%d: duplicate word %r, last count wins", path, lineno, norm)
                    # drop first so total stays consistent
                    del counts[norm]
                counts[norm] = count
        except UnicodeDecodeError as exc:
            raise IoError(f"{path} is not valid UTF-8: {exc}") from exc
    if not counts:
        raise EmptyBackground(f"{path} has no entries")
    return BackgroundTable(counts, sum(counts.values()), floor_count, warnings)


def relative_freq(table: BackgroundTable, word: str) -> float:
    """``count/total``, or ``floor_count/total`` for an absent word."""
    return table.counts.get(word, table.floor_count) / table.total
