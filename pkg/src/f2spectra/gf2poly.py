"""Polynomials over GF(2), minimal polynomials, and jump-ahead.

A GF2Poly is an int-backed bitset: coefficient i of the polynomial is
bit i of ``bits``.  Products of large polynomials ride on Python's
big-integer multiply by spreading each coefficient into its own 16-bit
column (column sums stay far below 2^16 for every degree this package
meets, so no carries cross columns); squaring only respaces bits.

``berlekamp_massey`` recovers the minimal LFSR connection polynomial of
a bit sequence; fed 2k+64 output bits of a k-dimensional generator it
returns the full characteristic polynomial of the transition matrix,
which ``jump_ahead`` then uses to advance any generator by an arbitrary
step count via Horner evaluation of t^steps mod that polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .bitlinalg import BitVector
    from .generators import Generator, GeneratorSpec

#: Arbitrary-precision unsigned integers are plain Python ints.
BigUint = int

_SPREAD_THRESHOLD_BITS = 4096
_SPREAD_COLUMN_LIMIT = 1 << 16


@lru_cache(maxsize=1)
def _spread16_table() -> np.ndarray:
    """Byte value -> eight uint16 columns, bit i of the byte in column i."""
    return ((np.arange(256)[:, None] >> np.arange(8)[None, :]) & 1).astype("<u2")


@lru_cache(maxsize=1)
def _spread2_table() -> np.ndarray:
    """Byte value -> uint16 with bit i moved to bit 2i (for squaring)."""
    vals = np.arange(256)
    out = np.zeros(256, dtype="<u2")
    for i in range(8):
        out |= (((vals >> i) & 1) << (2 * i)).astype("<u2")
    return out


def _spread16(x: int) -> int:
    raw = np.frombuffer(x.to_bytes(max(1, (x.bit_length() + 7) // 8), "little"), np.uint8)
    return int.from_bytes(_spread16_table()[raw].tobytes(), "little")


def _unspread16(x: int, out_bits: int) -> int:
    cols = np.frombuffer(x.to_bytes(2 * out_bits, "little"), "<u2")
    packed = np.packbits((cols & 1).astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _mul_bits(a: int, b: int) -> int:
    """Carryless product of two coefficient bitsets."""
    if a == 0 or b == 0:
        return 0
    la, lb = a.bit_length(), b.bit_length()
    if min(la, lb) <= _SPREAD_THRESHOLD_BITS:
        if la < lb:
            a, b, la, lb = b, a, lb, la
        acc = 0
        while b:
            low = b & -b
            acc ^= a << (low.bit_length() - 1)
            b ^= low
        return acc
    if min(la, lb) >= _SPREAD_COLUMN_LIMIT:
        raise OverflowError("operands too large for 16-bit spread columns")
    return _unspread16(_spread16(a) * _spread16(b), la + lb - 1)


def _square_bits(x: int) -> int:
    if x == 0:
        return 0
    raw = np.frombuffer(x.to_bytes((x.bit_length() + 7) // 8, "little"), np.uint8)
    return int.from_bytes(_spread2_table()[raw].tobytes(), "little")


@dataclass(frozen=True)
class GF2Poly:
    """Dense polynomial over GF(2); coefficient i is bit i of ``bits``."""

    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0:
            raise ValueError("negative coefficient bitset")

    @classmethod
    def x_power(cls, e: int) -> "GF2Poly":
        return cls(1 << e)

    @classmethod
    def from_degrees(cls, degrees) -> "GF2Poly":
        bits = 0
        for d in degrees:
            bits ^= 1 << d
        return cls(bits)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return self.bits.bit_length() - 1

    @property
    def weight(self) -> int:
        """Number of nonzero coefficients."""
        return self.bits.bit_count()

    def coeff(self, i: int) -> int:
        return (self.bits >> i) & 1

    def __bool__(self) -> bool:
        return self.bits != 0

    def __add__(self, other: "GF2Poly") -> "GF2Poly":
        return GF2Poly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "GF2Poly") -> "GF2Poly":
        return GF2Poly(_mul_bits(self.bits, other.bits))

    def square(self) -> "GF2Poly":
        return GF2Poly(_square_bits(self.bits))

    def __divmod__(self, other: "GF2Poly") -> tuple["GF2Poly", "GF2Poly"]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        d = other.degree
        ob = other.bits
        q, r = 0, self.bits
        while r.bit_length() - 1 >= d:
            s = r.bit_length() - 1 - d
            r ^= ob << s
            q |= 1 << s
        return GF2Poly(q), GF2Poly(r)

    def __floordiv__(self, other: "GF2Poly") -> "GF2Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "GF2Poly") -> "GF2Poly":
        return divmod(self, other)[1]

    def pow_mod(self, e: BigUint, mod: "GF2Poly") -> "GF2Poly":
        """self**e mod ``mod`` by square-and-multiply (e may be huge)."""
        if e < 0:
            raise ValueError("negative exponent")
        ctx = _Barrett(mod)
        result = ctx.reduce(GF2Poly(1))
        if e == 0:
            return result
        base = ctx.reduce(self)
        for ch in format(e, "b"):
            result = ctx.reduce(result.square())
            if ch == "1":
                result = ctx.reduce(result * base)
        return result

    def reciprocal(self) -> "GF2Poly":
        """t^degree * p(1/t): the coefficient sequence reversed in place."""
        if not self:
            return self
        return GF2Poly(int(format(self.bits, "b")[::-1], 2))

    def to_hex(self) -> str:
        return format(self.bits, "x")

    @classmethod
    def from_hex(cls, text: str) -> "GF2Poly":
        return cls(int(text, 16))

    def __repr__(self) -> str:
        return f"GF2Poly(degree={self.degree}, weight={self.weight})"


class _Barrett:
    """Reduction context: one division up front, two multiplies per reduce."""

    def __init__(self, mod: GF2Poly) -> None:
        if mod.degree < 1:
            raise ValueError("modulus must have positive degree")
        self.mod = mod
        self.d = mod.degree
        self.q = (GF2Poly.x_power(2 * self.d) // mod).bits

    def reduce(self, p: GF2Poly) -> GF2Poly:
        d = self.d
        mb = self.mod.bits
        r = p.bits
        hi = r >> d
        if hi:
            qhat = _mul_bits(hi, self.q) >> d
            r ^= _mul_bits(qhat, mb)
        while r.bit_length() - 1 >= d:
            r ^= mb << (r.bit_length() - 1 - d)
        return GF2Poly(r)


def berlekamp_massey(bits: int, nbits: int) -> GF2Poly:
    """Minimal connection polynomial of the sequence (bit i of ``bits``).

    Runs the iterative discrepancy update in a reversed-alignment frame:
    while processing step t, the working register holds coefficient c_i
    at bit (t+1-i), so the discrepancy is one AND + popcount; the +1
    offset keeps the initial backup (snapshot conceptually at step -1)
    representable.  Returns C with C.coeff(0) == 1 and degree L such
    that c_0 s_j = sum_{i=1..L} c_i s_{j-i} for all covered j.
    """
    seqs = bits << 1
    ca, ba, length = 2, 1, 0
    for t in range(nbits):
        if (ca & seqs).bit_count() & 1:
            if 2 * length <= t:
                ca, ba = ca ^ ba, ca
                length = t + 1 - length
            else:
                ca ^= ba
        ca <<= 1
    c = 0
    for i in range(length + 1):
        c |= ((ca >> (nbits + 1 - i)) & 1) << i
    return GF2Poly(c)


def output_bit_sequence(spec: "GeneratorSpec", nbits: int, seed: int = 12345) -> int:
    """Low bit of each of the first ``nbits`` outputs, packed bit i = step i."""
    from .generators import make_generator

    gen = make_generator(spec, seed)
    seq = 0
    for j in range(nbits):
        seq |= (gen.next_word() & 1) << j
    return seq


def minimal_polynomial(
    spec: "GeneratorSpec", seed: int = 12345, use_cache: bool = True
) -> GF2Poly:
    """Minimal polynomial of the transition matrix, via 2k+64 output bits.

    The returned polynomial is oriented so that it annihilates the
    transition matrix B (monic in t, constant term 1): it is the
    reciprocal of the connection polynomial ``berlekamp_massey``
    recovers.  It has full degree k for every bundled generator (their
    characteristic polynomials are primitive), so it is simultaneously
    the characteristic polynomial and annihilates every state.  Results
    for the bundled generators ship as hex files; pass
    ``use_cache=False`` to force recomputation.
    """
    if use_cache:
        cached = _bundled_minpoly(spec.name, seed)
        if cached is not None:
            return cached
    nbits = 2 * spec.k + 64
    conn = berlekamp_massey(output_bit_sequence(spec, nbits, seed), nbits)
    if conn.degree != spec.k:
        raise RuntimeError(
            f"recovered degree {conn.degree} != k={spec.k} for {spec.name}; "
            f"seed {seed} generates a degenerate bit sequence"
        )
    return conn.reciprocal()


# -- minimal-polynomial files ------------------------------------------


def format_minpoly(name: str, seed: int, poly: GF2Poly) -> str:
    return (
        "# minimal polynomial over GF(2); hex bit i = coefficient of t^i\n"
        f"# generator={name} seed={seed} degree={poly.degree} weight={poly.weight}\n"
        f"{poly.to_hex()}\n"
    )


def parse_minpoly(text: str) -> tuple[dict[str, int | str], GF2Poly]:
    meta: dict[str, int | str] = {}
    poly = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, value = token.split("=", 1)
                    meta[key] = int(value) if value.lstrip("-").isdigit() else value
            continue
        if poly is not None:
            raise ValueError("multiple polynomial payload lines")
        poly = GF2Poly.from_hex(line)
    if poly is None:
        raise ValueError("no polynomial payload line")
    if "degree" in meta and poly.degree != meta["degree"]:
        raise ValueError(f"degree mismatch: payload {poly.degree}, header {meta['degree']}")
    if "weight" in meta and poly.weight != meta["weight"]:
        raise ValueError(f"weight mismatch: payload {poly.weight}, header {meta['weight']}")
    return meta, poly


def _bundled_minpoly(name: str, seed: int) -> GF2Poly | None:
    entry = resources.files("f2spectra") / "data" / "minpoly" / f"{name.replace('-', '_')}.hex"
    try:
        text = entry.read_text()
    except (FileNotFoundError, OSError):
        return None
    meta, poly = parse_minpoly(text)
    if meta.get("generator") != name or meta.get("seed") != seed:
        return None
    return poly


# -- jump-ahead ---------------------------------------------------------


def jump_polynomial(
    spec: "GeneratorSpec", steps: BigUint, minpoly: GF2Poly | None = None
) -> GF2Poly:
    """t^steps mod the minimal polynomial of the transition matrix."""
    if steps < 0:
        raise ValueError("steps must be nonnegative; to go backward, add the period")
    if minpoly is None:
        minpoly = minimal_polynomial(spec)
    return GF2Poly.from_degrees([1]).pow_mod(steps, minpoly)


def apply_transition_polynomial(gen: "Generator", poly: GF2Poly) -> None:
    """Replace the generator state x by poly(B) x, Horner style.

    Each Horner stage is one ordinary generator step on an accumulator
    plus an optional XOR of the saved start state, so the cost is
    deg(poly) steps regardless of the jump count encoded in ``poly``.
    Dead bits introduced by whole-word XORs never feed live coordinates
    and are cleared at the end.
    """
    from .generators import make_generator

    spec = gen.spec
    n = spec.n
    x_words = [gen.st[gen._logical_index(j)] for j in range(n)]
    x_lung = gen.lung
    acc = make_generator(spec)  # zero state
    for i in range(poly.degree, -1, -1):
        acc.step()
        if poly.coeff(i):
            for j in range(n):
                acc.st[acc._logical_index(j)] ^= x_words[j]
            if spec.has_lung:
                acc.lung ^= x_lung
    acc_state = acc.get_raw_state()
    gen.set_raw_state(acc_state)  # normalizes the cursor, clears dead bits


def jump_ahead(gen: "Generator", steps: BigUint, minpoly: GF2Poly | None = None) -> None:
    """Advance ``gen`` by exactly ``steps`` recurrence steps in O(k) work."""
    apply_transition_polynomial(gen, jump_polynomial(gen.spec, steps, minpoly))


def find_low_weight_state(
    spec: "GeneratorSpec", d: BigUint, minpoly: GF2Poly | None = None
) -> "BitVector":
    """The state that reaches canonical unit vector e_0 after ``d`` steps.

    Jumping the weight-1 state forward by period-minus-d (the period is
    2^k - 1) lands on the predecessor d steps back — the worst seeds for
    the zeroland diagnostics, states whose entire trajectory stays
    near-degenerate for d steps.
    """
    from .bitlinalg import BitVector
    from .generators import make_generator

    if not 0 <= d < (1 << spec.k) - 1:
        raise ValueError("d must lie in [0, period)")
    gen = make_generator(spec)
    gen.set_state_vector(BitVector.unit(spec.k, 0))
    jump_ahead(gen, (1 << spec.k) - 1 - d, minpoly)
    return gen.state_vector()
