"""Deterministic text embeddings.

The hash provider derives every token vector from an FNV-1a seed fed into
SplitMix64, so equal (seed, dim, token) always gives bit-identical vectors
with no model download.  A file provider reads a plain-text word-vector
file and falls back to the hash provider for unknown tokens.

Phrases embed as the L2-normalized sum of their token vectors; flat
triples as the normalized sum of their three phrase vectors.  This is the
additive scheme whose blind spots the evaluation commands demonstrate.
"""

from __future__ import annotations

import re
from typing import Iterable, List

import numpy as np

from .errors import EmptyTokenError, VectorFileError
from .hashing import MASK64, SplitMix64, fnv1a64

DEFAULT_DIM = 64

_SEPARATORS = re.compile(r"[\s_\-]+")
_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def tokenize(label: str) -> List[str]:
    """Split on camelCase boundaries, underscores, hyphens and whitespace;
    lowercase; drop empties.  ``PlaceOfResidence`` -> place, of, residence."""
    tokens = []
    for chunk in _SEPARATORS.split(label):
        if not chunk:
            continue
        for piece in _CAMEL_BOUNDARY.split(chunk):
            if piece:
                tokens.append(piece.lower())
    return tokens


def normalized(vector: np.ndarray) -> np.ndarray:
    """L2-normalize; the zero vector stays zero."""
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        return vector
    return vector / norm


class HashEmbeddingProvider:
    """Pseudo-random unit vectors: FNV-1a(token) XOR seed feeds SplitMix64,
    whose outputs map to [-1, 1) before normalization."""

    def __init__(self, seed: int = 0, dim: int = DEFAULT_DIM):
        if dim <= 0:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.seed = seed
        self.dim = dim
        self._cache: dict = {}

    def token_vector(self, token: str) -> np.ndarray:
        if not token:
            raise EmptyTokenError("cannot embed an empty token")
        cached = self._cache.get(token)
        if cached is None:
            state = fnv1a64(token.encode("utf-8")) ^ (self.seed & MASK64)
            stream = SplitMix64(state)
            raw = np.array([stream.next_symmetric() for _ in range(self.dim)], dtype=np.float64)
            cached = normalized(raw)
            self._cache[token] = cached
        return cached


class FileEmbeddingProvider:
    """Exact-lookup vectors from a plain-text file.

    Format: an optional ``count dim`` header line, then one token followed
    by ``dim`` numbers per line, whitespace-separated.  Vectors are
    L2-normalized on load.  Lookups that miss fall back to a hash provider
    seeded with ``fallback_seed`` and are tallied in ``misses``.
    """

    def __init__(self, path, dim: int = DEFAULT_DIM, fallback_seed: int = 0):
        if dim <= 0:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.dim = dim
        self.fallback_seed = fallback_seed
        self.misses = 0
        self._fallback = HashEmbeddingProvider(fallback_seed, dim)
        self._vectors: dict = {}
        with open(path, "r", encoding="utf-8") as handle:
            self._load(handle)

    def _load(self, lines: Iterable[str]) -> None:
        first_data_line = True
        for line_no, raw in enumerate(lines, 1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split()
            if first_data_line and len(fields) == 2 and _all_ints(fields):
                declared = int(fields[1])
                if declared != self.dim:
                    raise VectorFileError(
                        line_no, f"file declares dimension {declared}, expected {self.dim}"
                    )
                first_data_line = False
                continue
            first_data_line = False
            token = fields[0]
            if len(fields) != self.dim + 1:
                raise VectorFileError(
                    line_no, f"expected {self.dim} components for {token!r}, got {len(fields) - 1}"
                )
            if token in self._vectors:
                raise VectorFileError(line_no, f"duplicate token {token!r}")
            try:
                components = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError:
                raise VectorFileError(line_no, f"non-numeric component for {token!r}") from None
            self._vectors[token] = normalized(components)

    def token_vector(self, token: str) -> np.ndarray:
        if not token:
            raise EmptyTokenError("cannot embed an empty token")
        vector = self._vectors.get(token)
        if vector is None:
            self.misses += 1
            return self._fallback.token_vector(token)
        return vector


def _all_ints(fields) -> bool:
    try:
        for item in fields:
            int(item)
    except ValueError:
        return False
    return True


def embed_token(provider, token: str) -> np.ndarray:
    return provider.token_vector(token)


def embed_phrase(provider, label: str) -> np.ndarray:
    """Normalized sum of the label's token vectors; the empty phrase maps
    to the zero vector."""
    tokens = tokenize(label)
    if not tokens:
        return np.zeros(provider.dim, dtype=np.float64)
    if len(tokens) == 1:
        return provider.token_vector(tokens[0])
    total = np.zeros(provider.dim, dtype=np.float64)
    for token in tokens:
        total = total + provider.token_vector(token)
    return normalized(total)


def embed_flat_triple(provider, triple) -> np.ndarray:
    """Normalized sum of the three phrase vectors of a flat triple.

    Accepts anything with e1/r/e2 attributes, or a 3-sequence of strings.
    """
    if hasattr(triple, "e1"):
        e1, r, e2 = triple.e1, triple.r, triple.e2
    else:
        e1, r, e2 = triple
    return normalized(embed_phrase(provider, e1) + embed_phrase(provider, r) + embed_phrase(provider, e2))


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity clamped to [-1, 1]; zero inputs give 0.0."""
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    value = float(np.dot(u, v)) / (norm_u * norm_v)
    return max(-1.0, min(1.0, value))
