"""Deterministic random number generation for the tree samplers.

Every random construction in :mod:`treecut.generate` is a pure function of
``(parameters, seed)``.  To make that contract portable and auditable the
package uses SplitMix64, a tiny 64-bit generator with a published reference
implementation, rather than an opaque library stream.  Reference outputs are
frozen in the test fixtures.

Streams are derived, never shared: :func:`derive_seed` hashes a base seed
with integer keys, so concurrent workers can draw from disjoint,
reproducible streams (``derive_seed(seed, size, rep)`` and similar).
"""

from __future__ import annotations

import math

from .errors import ValidationError

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a child seed from ``seed`` and a tuple of integer keys.

    Deterministic, order-sensitive, and independent of any generator state,
    so parallel callers can pre-compute their streams.
    """
    state = mix64(seed ^ _GOLDEN)
    for k in keys:
        state = mix64(state ^ mix64((k + 1) * _GOLDEN))
    return state


class SplitMix64:
    """The SplitMix64 sequence for a given seed.

    ``next_u64`` advances the state by the golden-ratio increment and
    returns the finalized output, matching the reference implementation.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return mix64(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, bound: int) -> int:
        """Uniform-ish integer in [0, bound) via a modulo draw.

        The modulo bias is below 2**-50 for every bound used here; taking
        the simple draw keeps the stream layout easy to reproduce.
        """
        if bound <= 0:
            raise ValidationError("bound must be positive")
        return self.next_u64() % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle driven by ``below``."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    # Samplers used by the offspring distributions.  All are inversion
    # style so a single uniform draw maps to one variate.

    def geometric(self, p: float) -> int:
        """Number of failures before the first success, P(j) = p(1-p)^j."""
        if p >= 1.0:
            return 0
        u = self.random()
        return int(math.floor(math.log1p(-u) / math.log1p(-p)))

    def poisson(self, lam: float) -> int:
        u = self.random()
        k = 0
        term = math.exp(-lam)
        cum = term
        while u > cum:
            k += 1
            term *= lam / k
            cum += term
            if k > 10_000_000:  # numerically unreachable for sane lambda
                break
        return k

    def from_table(self, probs) -> int:
        u = self.random()
        cum = 0.0
        for j, pj in enumerate(probs):
            cum += pj
            if u < cum:
                return j
        return len(probs) - 1
