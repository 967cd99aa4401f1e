"""Generator interfaces and the canonical state-bit layout.

Every generator here updates a ring of n w-bit words (plus, for the MELG
family, one extra w-bit "lung" word) by an F2-linear recurrence, so the
full state is a vector over GF(2).  The canonical coordinates used
throughout the package enumerate that vector as:

    newest ring word first, oldest ring word last, most-significant bit
    first within each word; the r dead low bits of the oldest word (the
    bits the recurrence never reads) are skipped; the lung, when
    present, contributes its w bits last.

That yields exactly k coordinates, k = n*w - r (+ w when there is a
lung).  ``state_vector``/``set_state_vector`` are the codec between live
generator state and those coordinates; ``set_raw_state`` normalizes the
ring cursor to zero and clears dead bits so equal states have equal
canonical vectors.
"""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..bitlinalg import BitVector

#: Sentinel "logical word index" marking lung coordinates in the layout.
LUNG_WORD = -1


class Family(enum.Enum):
    MT32 = "MT32"
    MT64_ID1 = "MT64_ID1"
    MT64_ID3 = "MT64_ID3"
    WELL = "WELL"
    MELG = "MELG"


@dataclass(frozen=True)
class GeneratorSpec:
    """Complete parameter set of one generator (loaded from a .params file)."""

    name: str
    family: Family
    w: int
    n: int
    r: int  # dead low bits of the oldest ring word
    init_f: int
    init_shift: int
    a: int | None = None  # twist constant (MT, MELG)
    m: int | None = None  # single feedback tap (MT32, MT64_ID1, MELG)
    m1: int | None = None  # multi-tap feedback (MT64_ID3, WELL)
    m2: int | None = None
    m3: int | None = None
    temper: tuple[int, int, int, int, int, int, int] | None = None  # (u,d,s,b,t,c,l)
    transforms: tuple[tuple[str, int], ...] | None = None  # WELL T0..T7
    lag: int | None = None  # MELG output lag
    s1: int | None = None  # MELG lung/feedback shifts
    s2: int | None = None
    s3: int | None = None
    b: int | None = None  # MELG tempering mask

    @property
    def has_lung(self) -> bool:
        return self.family is Family.MELG

    @property
    def k(self) -> int:
        """State dimension over GF(2)."""
        return self.n * self.w - self.r + (self.w if self.has_lung else 0)

    @property
    def word_mask(self) -> int:
        return (1 << self.w) - 1


@dataclass(frozen=True)
class GeneratorState:
    """Raw ring snapshot: storage-order words, cursor, and optional lung."""

    words: tuple[int, ...]
    cursor: int
    lung: int | None = None


@lru_cache(maxsize=None)
def canonical_layout(spec: GeneratorSpec) -> tuple[np.ndarray, np.ndarray]:
    """Map canonical index -> (logical word, bit position), as two arrays.

    Logical word 0 is the oldest ring word and n-1 the newest; LUNG_WORD
    marks lung coordinates.  Both arrays have length ``spec.k``.
    """
    words: list[int] = []
    bits: list[int] = []
    for j in range(spec.n - 1, -1, -1):
        low = spec.r if j == 0 else 0
        for bpos in range(spec.w - 1, low - 1, -1):
            words.append(j)
            bits.append(bpos)
    if spec.has_lung:
        for bpos in range(spec.w - 1, -1, -1):
            words.append(LUNG_WORD)
            bits.append(bpos)
    assert len(words) == spec.k
    return np.array(words, dtype=np.int64), np.array(bits, dtype=np.int64)


class Generator(ABC):
    """Scalar (single-stream) generator over plain Python integers."""

    def __init__(self, spec: GeneratorSpec, seed: int | None = None) -> None:
        self.spec = spec
        self.st: list[int] = [0] * spec.n
        self.cursor = 0
        self.lung: int | None = 0 if spec.has_lung else None
        if seed is not None:
            self.seed(seed)

    # -- seeding -------------------------------------------------------

    def seed(self, seed: int) -> None:
        """Knuth-style multiplicative fill; the lung continues the fill."""
        spec = self.spec
        mask = spec.word_mask
        st = self.st
        st[0] = seed & mask
        for i in range(1, spec.n):
            prev = st[i - 1]
            st[i] = (spec.init_f * (prev ^ (prev >> spec.init_shift)) + i) & mask
        self.cursor = 0
        if spec.has_lung:
            prev = st[spec.n - 1]
            self.lung = (spec.init_f * (prev ^ (prev >> spec.init_shift)) + spec.n) & mask

    # -- stepping --------------------------------------------------------

    @abstractmethod
    def step(self) -> None:
        """Advance the recurrence one step (no output)."""

    @abstractmethod
    def output_word(self) -> int:
        """Tempered output of the current (already advanced) state."""

    def next_word(self) -> int:
        self.step()
        return self.output_word()

    @abstractmethod
    def next_real(self) -> float:
        """Float in [0, 1) using the family's published conversion."""

    # -- state access ----------------------------------------------------

    def _logical_index(self, j: int) -> int:
        """Storage index of logical word j (0 = oldest)."""
        return (self.cursor + j) % self.spec.n

    def get_raw_state(self) -> GeneratorState:
        return GeneratorState(tuple(self.st), self.cursor, self.lung)

    def set_raw_state(self, state: GeneratorState) -> None:
        spec = self.spec
        n = spec.n
        if len(state.words) != n:
            raise ValueError(f"expected {n} words, got {len(state.words)}")
        if spec.has_lung != (state.lung is not None):
            raise ValueError("lung presence does not match the generator family")
        mask = spec.word_mask
        # Rotate so the cursor lands on zero; logical order is preserved
        # because every family keeps consecutive logical words consecutive
        # in storage.
        rotated = [state.words[(state.cursor + t) % n] & mask for t in range(n)]
        self.st = rotated
        self.cursor = 0
        if spec.r:
            oldest = self._logical_index(0)
            self.st[oldest] &= mask ^ ((1 << spec.r) - 1)
        self.lung = (state.lung & mask) if spec.has_lung else None

    def state_vector(self) -> BitVector:
        wds, bts = canonical_layout(self.spec)
        value = 0
        st = self.st
        for c, (j, b) in enumerate(zip(wds.tolist(), bts.tolist())):
            word = self.lung if j == LUNG_WORD else st[self._logical_index(j)]
            value |= ((word >> b) & 1) << c
        return BitVector(self.spec.k, value)

    def set_state_vector(self, v: BitVector) -> None:
        spec = self.spec
        if v.length != spec.k:
            raise ValueError(f"expected {spec.k} bits, got {v.length}")
        wds, bts = canonical_layout(spec)
        st = [0] * spec.n
        lung = 0
        self.cursor = 0
        val = v.value
        for c, (j, b) in enumerate(zip(wds.tolist(), bts.tolist())):
            if (val >> c) & 1:
                if j == LUNG_WORD:
                    lung |= 1 << b
                else:
                    st[self._logical_index(j)] |= 1 << b
        self.st = st
        self.lung = lung if spec.has_lung else None
