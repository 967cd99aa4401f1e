"""Mersenne Twister generators, 32- and 64-bit, one or three feedback taps.

The update is the single-word form of the twisted GFSR recurrence: each
step splices the top w-r bits of the oldest word with the low r bits of
its successor, applies the twist, XORs the feedback tap(s), and writes
the result over the oldest slot.  The output runs through the usual
four-stage tempering.
"""

from __future__ import annotations

from .base import Generator, GeneratorSpec

_INV53 = 1.0 / 9007199254740992.0  # 2^-53


class MtGenerator(Generator):
    def __init__(self, spec: GeneratorSpec, seed: int | None = None) -> None:
        self._upper = spec.word_mask ^ ((1 << spec.r) - 1)
        self._lower = (1 << spec.r) - 1
        self._taps = (spec.m,) if spec.m is not None else (spec.m1, spec.m2, spec.m3)
        super().__init__(spec, seed)

    def step(self) -> None:
        st, c, n = self.st, self.cursor, self.spec.n
        x = (st[c] & self._upper) | (st[(c + 1) % n] & self._lower)
        v = (x >> 1) ^ (self.spec.a if x & 1 else 0)
        for t in self._taps:
            v ^= st[(c + t) % n]
        st[c] = v
        self.cursor = (c + 1) % n

    def output_word(self) -> int:
        newest = self.st[(self.cursor - 1) % self.spec.n]
        return self._temper(newest)

    def _temper(self, y: int) -> int:
        u, d, s, b, t, c, l = self.spec.temper
        y ^= (y >> u) & d
        y ^= (y << s) & b
        y ^= (y << t) & c
        y ^= y >> l
        return y

    def next_real(self) -> float:
        if self.spec.w == 32:
            hi = self.next_word() >> 5
            lo = self.next_word() >> 6
            return (hi * 67108864.0 + lo) * _INV53
        return (self.next_word() >> 11) * _INV53
