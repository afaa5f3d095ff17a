"""Per-document random streams.

Each document gets its own generator keyed by ``(global seed, doc id)``::

    doc_key = little-endian uint64 of blake2b(doc_id.utf8, digest_size=8)
    stream  = splitmix64(splitmix64(seed mod 2**64) XOR doc_key)
    rng     = numpy.random.Generator(PCG64(stream))

so results never depend on which worker handled a document or in what
order documents were processed.
"""
import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def doc_key(doc_id: str) -> int:
    digest = hashlib.blake2b(doc_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def stream_seed(seed: int, doc_id: str) -> int:
    return splitmix64(splitmix64(seed & MASK64) ^ doc_key(doc_id))


def doc_stream(seed: int, doc_id: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(stream_seed(seed, doc_id)))
