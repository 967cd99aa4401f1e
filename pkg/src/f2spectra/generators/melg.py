"""MELG generators (maximally equidistributed long-period linear, 64-bit).

The state is a ring of n 64-bit words plus one extra "lung" word folded
into every step.  A step splices the live high bits of the oldest word
with the low bits of its successor, mixes that with the feedback tap and
the sheared lung, writes the new lung, and overwrites the oldest slot.
The output tempers the newest word and XORs in a lagged state word,
which keeps the output map linear in the post-step state.
"""

from __future__ import annotations

from .base import Generator, GeneratorSpec

_INV53 = 1.0 / 9007199254740992.0  # 2^-53


class MelgGenerator(Generator):
    def __init__(self, spec: GeneratorSpec, seed: int | None = None) -> None:
        self._masku = (spec.word_mask << spec.r) & spec.word_mask
        self._maskl = spec.word_mask ^ self._masku
        super().__init__(spec, seed)

    def step(self) -> None:
        spec = self.spec
        st, i, n = self.st, self.cursor, spec.n
        mask = spec.word_mask
        x = (st[i] & self._masku) | (st[(i + 1) % n] & self._maskl)
        lung = (
            (x >> 1)
            ^ (spec.a if x & 1 else 0)
            ^ st[(i + spec.m) % n]
            ^ (self.lung ^ ((self.lung << spec.s1) & mask))
        )
        self.lung = lung
        st[i] = x ^ (lung ^ (lung >> spec.s2))
        self.cursor = (i + 1) % n

    def output_word(self) -> int:
        spec = self.spec
        st, n = self.st, spec.n
        newest = st[(self.cursor - 1) % n]
        y = newest ^ ((newest << spec.s3) & spec.b)
        return y ^ st[(self.cursor - 1 + spec.lag) % n]

    def next_real(self) -> float:
        return (self.next_word() >> 11) * _INV53
