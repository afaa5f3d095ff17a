"""Corpus loading: plaintext and pretokenized (JSON Lines) documents.

A document is a sequence of tokens partitioned into groups. A group is the
unit that gets masked atomically: a word in plaintext input, or any
caller-defined set of tokens (subwords of a word, patches of an object
region) in pretokenized input.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from diffmask.errors import (
    EmptyCorpus,
    EmptyDocument,
    InvalidGrouping,
    InvalidVectors,
    IoError,
)

logger = logging.getLogger(__name__)

_RECORD_KEYS = {"id", "tokens", "groups", "vectors"}


def _strip(piece: str) -> str:
    start, end = 0, len(piece)
    while start < end and not piece[start].isalnum():
        start += 1
    while end > start and not piece[end - 1].isalnum():
        end -= 1
    return piece[start:end]


def normalize(text: str) -> str:
    """Lowercase and strip leading/trailing non-alphanumeric characters."""
    return _strip(text).lower()


@dataclass(frozen=True)
class Token:
    text: str
    normalized: str
    group_index: int
    inline_vector: Optional[np.ndarray] = field(default=None, compare=False)


@dataclass(frozen=True)
class Group:
    members: tuple[int, ...]
    label: Optional[str] = None


@dataclass(frozen=True)
class Document:
    id: str
    tokens: tuple[Token, ...]
    groups: tuple[Group, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def has_vectors(self) -> bool:
        return self.tokens[0].inline_vector is not None

    def group_sizes(self) -> list[int]:
        return [len(g.members) for g in self.groups]


def word_tokenize(text: str, doc_id: str = "0") -> Document:
    """Split on whitespace into one singleton group per word.

    >>> [t.normalized for t in word_tokenize("The inhibitor binds.").tokens]
    ['the', 'inhibitor', 'binds']
    """
    tokens = []
    groups = []
    for piece in text.split():
        stripped = _strip(piece)
        if not stripped:
            continue
        norm = stripped.lower()
        idx = len(tokens)
        tokens.append(Token(stripped, norm, idx))
        groups.append(Group((idx,), norm))
    if not tokens:
        raise EmptyDocument(f"document {doc_id!r} has no tokens")
    return Document(doc_id, tuple(tokens), tuple(groups))


def _open_text(path):
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def load_plaintext(path) -> list[Document]:
    """One document per line; ids are zero-based line numbers.

    Blank lines (including lines with nothing but punctuation) are skipped
    with a warning.
    """
    docs = []
    skipped = 0
    with _open_text(path) as fh:
        try:
            lines = fh.read().splitlines()
        except UnicodeDecodeError as exc:
            raise IoError(f"{path} is not valid UTF-8: {exc}") from exc
    for lineno, line in enumerate(lines):
        try:
            docs.append(word_tokenize(line, str(lineno)))
        except EmptyDocument:
            skipped += 1
            logger.warning("%s:%d: blank line skipped", path, lineno + 1)
    if not docs:
        raise EmptyCorpus(f"{path} contains no documents")
    if skipped:
        logger.info("%s: %d blank line(s) skipped", path, skipped)
    return docs


def _build_document(rec: dict, where: str) -> Document:
    doc_id = rec.get("id")
    raw_tokens = rec.get("tokens")
    raw_groups = rec.get("groups")
    if not isinstance(doc_id, str):
        raise InvalidGrouping(f"{where}: 'id' must be a string")
    if not isinstance(raw_tokens, list) or not raw_tokens:
        raise EmptyDocument(f"{where}: 'tokens' must be a nonempty list")
    if not isinstance(raw_groups, list):
        raise InvalidGrouping(f"{where}: 'groups' must be a list")
    n = len(raw_tokens)

    owner = [-1] * n
    groups = []
    for gi, g in enumerate(raw_groups):
        members = g.get("members") if isinstance(g, dict) else None
        if not isinstance(members, list) or not members:
            raise InvalidGrouping(f"{where}: group {gi} has no members")
        for m in members:
            if not isinstance(m, int) or isinstance(m, bool) or not 0 <= m < n:
                raise InvalidGrouping(f"{where}: group {gi} member {m!r} out of range")
            if owner[m] != -1:
                raise InvalidGrouping(
                    f"{where}: token {m} in groups {owner[m]} and {gi}"
                )
            owner[m] = gi
        label = g.get("label")
        if label is not None and not isinstance(label, str):
            raise InvalidGrouping(f"{where}: group {gi} label must be a string")
        groups.append(Group(tuple(members), label))
    missing = [i for i, o in enumerate(owner) if o == -1]
    if missing:
        raise InvalidGrouping(f"{where}: tokens {missing[:5]} belong to no group")

    vectors = rec.get("vectors")
    if vectors is not None:
        if not isinstance(vectors, list) or len(vectors) != n:
            raise InvalidVectors(f"{where}: need one vector per token")
        dims = {len(v) if isinstance(v, list) else -1 for v in vectors}
        if len(dims) != 1 or -1 in dims or 0 in dims:
            raise InvalidVectors(f"{where}: ragged vector dimensions {sorted(dims)}")
        try:
            vecs = np.asarray(vectors, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InvalidVectors(f"{where}: non-numeric vector entry") from exc
        if not np.all(np.isfinite(vecs)):
            raise InvalidVectors(f"{where}: non-finite vector entry")
        vecs.setflags(write=False)
    else:
        vecs = None

    tokens = []
    for i, text in enumerate(raw_tokens):
        if not isinstance(text, str):
            raise EmptyDocument(f"{where}: token {i} is not a string")
        tokens.append(
            Token(text, normalize(text), owner[i], None if vecs is None else vecs[i])
        )
    return Document(doc_id, tuple(tokens), tuple(groups))


def load_pretokenized(path) -> list[Document]:
    """Load JSON Lines records ``{"id", "tokens", "groups", "vectors"?}``."""
    docs = []
    unknown = 0
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InvalidGrouping(f"{where}: invalid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict):
                raise InvalidGrouping(f"{where}: record must be an object")
            extra = sorted(set(rec) - _RECORD_KEYS)
            if extra:
                unknown += 1
                logger.warning("%s: unknown field(s) ignored: %s", where, ", ".join(extra))
            docs.append(_build_document(rec, where))
    if not docs:
        raise EmptyCorpus(f"{path} contains no documents")
    if unknown:
        logger.info("%s: %d record(s) with unknown fields", path, unknown)
    return docs


def load_corpus(path) -> list[Document]:
    """Dispatch on extension: ``.jsonl`` is pretokenized, anything else plaintext."""
    if Path(path).suffix.lower() in (".jsonl", ".ndjson"):
        return load_pretokenized(path)
    return load_plaintext(path)


def document_to_record(doc: Document) -> dict:
    rec = {
        "id": doc.id,
        "tokens": [t.text for t in doc.tokens],
        "groups": [],
    }
    for g in doc.groups:
        entry = {"members": list(g.members)}
        if g.label is not None:
            entry["label"] = g.label
        rec["groups"].append(entry)
    if doc.has_vectors:
        rec["vectors"] = [t.inline_vector.tolist() for t in doc.tokens]
    return rec


def dump_pretokenized(documents: Iterable[Document], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps(document_to_record(doc), ensure_ascii=False))
            fh.write("\n")


def documents_by_id(documents: Sequence[Document]) -> dict[str, Document]:
    return {d.id: d for d in documents}
