"""Deterministic 64-bit randomness for the whole package.

Everything random (deck shuffles, rollout policies, player choices) is
driven by SplitMix64 streams seeded explicitly; there is no global RNG.
SplitMix64 is a tiny, well-studied generator whose state transition and
output mix are exact 64-bit integer arithmetic, so the compiled rollout
kernel reproduces the pure-Python streams bit for bit.

Sub-streams are split off with :func:`derive`, which hashes (seed, index)
into a fresh 64-bit seed.  Uniform integers below ``n`` are taken as
``next_u64() % n``; the modulo bias is at most n / 2**64 and the same
expression is used on both sides of the C/Python fence.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 output mix: a 64-bit bijection with good avalanche."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive(seed: int, index: int) -> int:
    """Derive an independent child seed from (seed, index).

    Distinct indexes for the same parent can never collide (mix64 is a
    bijection applied to distinct inputs).
    """
    return mix64((seed + GOLDEN * (index + 1)) & MASK64)


class Rng:
    """A SplitMix64 stream."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        return self.next_u64() % n

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, consuming one draw per position."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
