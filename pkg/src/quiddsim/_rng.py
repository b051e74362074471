"""Deterministic pseudo-random numbers for measurement sampling.

Both simulation engines draw from the same generator so that seeded runs
are reproducible across platforms and across engines. The generator is
xorshift64* (Marsaglia xorshift with a multiplicative finalizer):

    s ^= s >> 12
    s ^= (s << 25) & 2**64-1
    s ^= s >> 27
    output = (s * 0x2545F4914F6CDD1D) & 2**64-1

Uniform doubles take the top 53 bits of the output, giving values in
[0, 1). A zero seed is remapped to a fixed nonzero constant because the
all-zero state is a fixed point of the recurrence.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_ZERO_SEED = 0x9E3779B97F4A7C15


class XorShift64Star:
    """64-bit xorshift* stream; deterministic for a given seed."""

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        state = seed & _MASK64
        if state == 0:
            state = _ZERO_SEED
        self.state = state

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s ^= (s << 25) & _MASK64
        s ^= s >> 27
        self.state = s
        return (s * _MULT) & _MASK64

    def uniform(self) -> float:
        """Uniform double in [0, 1), from the top 53 bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)
