"""64-bit FNV-1a and SplitMix64 primitives.

Both are fixed-width integer recurrences, so identical inputs produce
identical outputs on every platform and Python version.  They back the
content-derived node ids of the canonicalizer and the hash embedding
provider.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3

_SM64_GAMMA = 0x9E3779B97F4A7C15
_SM64_MIX1 = 0xBF58476D1CE4E5B9
_SM64_MIX2 = 0x94D049BB133111EB


def fnv1a64(data: bytes) -> int:
    """Hash bytes with 64-bit FNV-1a."""
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & MASK64
    return h


def fnv1a64_hex(text: str) -> str:
    """FNV-1a of UTF-8 encoded text, rendered as 16 lowercase hex digits."""
    return format(fnv1a64(text.encode("utf-8")), "016x")


class SplitMix64:
    """Deterministic 64-bit pseudo-random stream seeded by one integer."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _SM64_GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _SM64_MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _SM64_MIX2) & MASK64
        return z ^ (z >> 31)

    def next_symmetric(self) -> float:
        """Next float in [-1.0, 1.0), from the top 53 bits of one output."""
        return (self.next_u64() >> 11) / 4503599627370496.0 - 1.0
