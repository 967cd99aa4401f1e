"""Exact integer characteristic polynomials of twisted-GFSR transitions.

The n-word shift structure of this generator family collapses its
(nw - r)-square transition matrix to closed-form characteristic
polynomials:

* plain twisted GFSR (r = 0):  phi_B(t) = phi_S(t^n - t^m), where S is
  the w-square twist block — the substitution holds over the integers,
  not just mod 2 (the popular t^n + t^m form agrees only mod 2);
* with r masked bits:  phi_B = X^(w-r) Y^r
      - X^(w-r) * sum_{i=0}^{r-2} a_i Y^(r-1-i)
      - sum_{i=max(r-1,0)}^{w-1} a_i X^(w-i-1),
  where X = t^n - t^m, Y = t^(n-1) - t^(m-1), and a_i is bit i of the
  twist constant (a_0 the least significant).  At r = 0 the second sum
  absorbs everything and the expression reduces to the substitution
  form.

``assemble_block_matrix`` builds the integer block matrix these
formulas are the characteristic polynomials of.  Two conventions hide
in it and both matter:

* The tap identity is anchored by *scalar* row position (n-1-m)w, not
  by block index.  With masked bits the block row above the twist block
  is only w - r tall, so for m = 1 the tap block straddles it: the
  first w - r tap rows land there and the remaining r rows add into the
  twist block's rows.  Where a tap one meets a twist one the integer
  entry is 2 — reduced mod 2 those entries vanish, which is why the
  masked formula and the true GF(2) dynamics agree mod 2 while their
  integer characteristic polynomials differ exactly when m = 1 and a
  is odd.
* The assembled matrix is the transpose of the canonical dynamics mod
  2 (``mt_step_matrix``), so it acts on state row vectors; transposing
  does not change characteristic polynomials.

Everything here is verifiable: ``mt_step_matrix`` builds the transition
matrix in canonical coordinates directly from the block structure (it
must equal the probe-extracted matrix of a matching generator), and
``brute_charpoly`` computes exact integer characteristic polynomials by
Bareiss determinant evaluation plus Lagrange interpolation, giving an
independent oracle for every formula above at small dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bitlinalg import BitMatrix

ORACLE_DIM_LIMIT = 64


@dataclass(frozen=True)
class ZPoly:
    """Sparse integer-coefficient polynomial: sorted (degree, coeff) pairs."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        degrees = [d for d, _ in self.terms]
        if degrees != sorted(degrees) or len(set(degrees)) != len(degrees):
            raise ValueError("terms must be sorted by degree, without duplicates")
        if any(c == 0 for _, c in self.terms) or any(d < 0 for d, _ in self.terms):
            raise ValueError("zero coefficients and negative degrees are not stored")

    @classmethod
    def from_dict(cls, coeffs: dict[int, int]) -> "ZPoly":
        return cls(tuple(sorted((d, c) for d, c in coeffs.items() if c)))

    @classmethod
    def from_dense(cls, coeffs: Sequence[int]) -> "ZPoly":
        """Coefficient list, lowest degree first."""
        return cls.from_dict({d: c for d, c in enumerate(coeffs)})

    @classmethod
    def constant(cls, c: int) -> "ZPoly":
        return cls.from_dict({0: c})

    @classmethod
    def x_power(cls, e: int, c: int = 1) -> "ZPoly":
        return cls.from_dict({e: c})

    @property
    def degree(self) -> int:
        return self.terms[-1][0] if self.terms else -1

    def coeff(self, d: int) -> int:
        for deg, c in self.terms:
            if deg == d:
                return c
        return 0

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "ZPoly") -> "ZPoly":
        out = dict(self.terms)
        for d, c in other.terms:
            out[d] = out.get(d, 0) + c
        return ZPoly.from_dict(out)

    def __neg__(self) -> "ZPoly":
        return ZPoly(tuple((d, -c) for d, c in self.terms))

    def __sub__(self, other: "ZPoly") -> "ZPoly":
        return self + (-other)

    def __mul__(self, other: "ZPoly") -> "ZPoly":
        out: dict[int, int] = {}
        for d1, c1 in self.terms:
            for d2, c2 in other.terms:
                d = d1 + d2
                out[d] = out.get(d, 0) + c1 * c2
        return ZPoly.from_dict(out)

    def scale(self, c: int) -> "ZPoly":
        if c == 0:
            return ZPoly()
        return ZPoly(tuple((d, c * cc) for d, cc in self.terms))

    def __pow__(self, e: int) -> "ZPoly":
        if e < 0:
            raise ValueError("negative power")
        result = ZPoly.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def substitute(self, inner: "ZPoly") -> "ZPoly":
        """self(inner(t)), Horner over the sparse coefficient list."""
        result = ZPoly()
        prev_deg: int | None = None
        for d, c in reversed(self.terms):
            if prev_deg is not None:
                result = result * inner ** (prev_deg - d)
            result = result + ZPoly.constant(c)
            prev_deg = d
        if prev_deg is not None and prev_deg > 0:
            result = result * inner**prev_deg
        return result

    def evaluate(self, x: int) -> int:
        return sum(c * x**d for d, c in self.terms)

    def to_dense(self) -> list[int]:
        """Coefficient list, lowest degree first (empty for the zero poly)."""
        out = [0] * (self.degree + 1)
        for d, c in self.terms:
            out[d] = c
        return out

    def to_gf2(self):
        from .gf2poly import GF2Poly

        bits = 0
        for d, c in self.terms:
            if c & 1:
                bits |= 1 << d
        return GF2Poly(bits)

    def __repr__(self) -> str:
        if not self.terms:
            return "ZPoly(0)"
        parts = [f"{c}*t^{d}" if d else str(c) for d, c in reversed(self.terms)]
        return f"ZPoly({' + '.join(parts)})"


def format_zpoly(poly: ZPoly) -> str:
    """Decimal coefficients, one per line, lowest degree first."""
    dense = poly.to_dense() or [0]
    return "\n".join(str(c) for c in dense) + "\n"


def parse_zpoly(text: str) -> ZPoly:
    coeffs = [int(line) for line in text.split() if line]
    return ZPoly.from_dense(coeffs)


# -- block-recurrence parameters -------------------------------------------


@dataclass(frozen=True)
class BlockSpec:
    """Word-level shape of an n-word twisted recurrence: n words of w
    bits, middle tap offset m, r masked (dead) bits, twist constant a."""

    n: int
    m: int
    w: int
    r: int
    a: int

    def __post_init__(self) -> None:
        if not 0 < self.m < self.n:
            raise ValueError("need 0 < m < n")
        if not 0 <= self.r < self.w:
            raise ValueError("need 0 <= r < w")
        if not 0 <= self.a < (1 << self.w):
            raise ValueError("twist constant must fit in w bits")

    @property
    def dim(self) -> int:
        return self.n * self.w - self.r


# -- closed-form characteristic polynomials ------------------------------


def binomial_power(n: int, m: int, e: int, sign: int = -1) -> ZPoly:
    """(t^n + sign*t^m)^e expanded exactly via binomial coefficients."""
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    coeffs: dict[int, int] = {}
    for j in range(e + 1):
        d = n * (e - j) + m * j
        coeffs[d] = coeffs.get(d, 0) + math.comb(e, j) * (sign**j)
    return ZPoly.from_dict(coeffs)


def phi_A(a: int, w: int) -> ZPoly:
    """Characteristic polynomial of the w-square twist companion block A:
    t^w - sum_{i=0}^{w-1} a_i t^(w-1-i), with a_0 the low bit of ``a``."""
    coeffs = {w: 1}
    for i in range(w):
        if (a >> i) & 1:
            coeffs[w - 1 - i] = coeffs.get(w - 1 - i, 0) - 1
    return ZPoly.from_dict(coeffs)


def tgfsr_charpoly(n: int, m: int, phi_s: ZPoly, sign: int = -1) -> ZPoly:
    """phi_S(t^n + sign*t^m): exact integer characteristic polynomial of
    the r = 0 block matrix for sign = -1.  The sign = +1 variant agrees
    only modulo 2."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    result = ZPoly()
    for e in range(phi_s.degree + 1):
        c = phi_s.coeff(e)
        if c:
            result = result + binomial_power(n, m, e, sign).scale(c)
    return result


def mt_charpoly(spec: BlockSpec) -> ZPoly:
    """Exact integer characteristic polynomial with r masked bits
    (degree nw - r); reduces to ``tgfsr_charpoly`` at r = 0."""
    n, m, w, r, a = spec.n, spec.m, spec.w, spec.r, spec.a
    x = binomial_power(n, m, 1)  # t^n - t^m
    y = binomial_power(n - 1, m - 1, 1) if m > 1 else ZPoly.from_dict({n - 1: 1, 0: -1})
    # m = 1 gives Y = t^(n-1) - t^0; binomial_power requires m >= 1, so
    # the shifted pair (n-1, 0) is spelled out directly.
    x_pows = [ZPoly.constant(1)]
    for _ in range(w):
        x_pows.append(x_pows[-1] * x)
    y_pows = [ZPoly.constant(1)]
    for _ in range(r):
        y_pows.append(y_pows[-1] * y)

    result = x_pows[w - r] * y_pows[r]
    for i in range(0, r - 1):
        if (a >> i) & 1:
            result = result - x_pows[w - r] * y_pows[r - 1 - i]
    for i in range(max(r - 1, 0), w):
        if (a >> i) & 1:
            result = result - x_pows[w - i - 1]
    return result


# -- block matrices ---------------------------------------------------------


def twist_companion_matrix(a: int, w: int) -> BitMatrix:
    """The w-square twist block A in companion orientation: ones on the
    superdiagonal, bottom row a_(w-1) .. a_0 left to right.  Its
    characteristic polynomial is ``phi_A(a, w)``."""
    mat_rows = [0] * w
    for i in range(w - 1):
        mat_rows[i] = 1 << (i + 1)
    for j in range(w):
        if (a >> (w - 1 - j)) & 1:
            mat_rows[w - 1] |= 1 << j
    return BitMatrix.from_int_rows(mat_rows, w)


def assemble_block_matrix(spec: BlockSpec) -> list[list[int]]:
    """The (nw - r)-square integer block matrix whose characteristic
    polynomial the closed forms compute.

    Layout (block rows top to bottom): identity blocks on the block
    superdiagonal; the block row above the twist row is w - r tall and
    the last block column w - r wide; the twist block S = P A sits in
    the last block row at column 0, where P swaps the r masked
    coordinates above the w - r live ones; the tap identity I_w starts
    at scalar row (n-1-m)w, column 0.  Entries are summed over the
    integers, so the m = 1 tap straddle can produce entries equal to 2;
    everywhere else the matrix is 0/1.  Reduced mod 2 it is the
    transpose of ``mt_step_matrix``.
    """
    n, m, w, r, a = spec.n, spec.m, spec.w, spec.r, spec.a
    dim = spec.dim
    if dim > ORACLE_DIM_LIMIT:
        raise ValueError(f"matrix dimension {dim} exceeds oracle limit {ORACLE_DIM_LIMIT}")
    mat = [[0] * dim for _ in range(dim)]

    def row_start(i: int) -> int:
        # block rows 0 .. n-2 start at i*w; the narrow row n-2 is w-r
        # tall, so the last block row starts r earlier than (n-1)*w
        return i * w if i <= n - 2 else (n - 1) * w - r

    def row_height(i: int) -> int:
        return w - r if i == n - 2 else w

    def col_width(j: int) -> int:
        return w - r if j == n - 1 else w

    # identity blocks on the block superdiagonal
    for i in range(n - 1):
        span = min(row_height(i), col_width(i + 1))
        for q in range(span):
            mat[row_start(i) + q][(i + 1) * w + q] += 1
    # tap identity anchored at scalar row (n-1-m)*w
    base = (n - 1 - m) * w
    for q in range(w):
        mat[base + q][q] += 1
    # twist block S = P A in the last block row
    dense_a = twist_companion_matrix(a, w).to_dense().tolist()
    s_block = [dense_a[w - r + i] for i in range(r)] + [dense_a[i] for i in range(w - r)]
    last = row_start(n - 1)
    for q in range(w):
        row = mat[last + q]
        for c in range(w):
            row[c] += s_block[q][c]
    return mat


def mt_step_matrix(spec: BlockSpec) -> BitMatrix:
    """One-step transition matrix in canonical coordinates, (nw - r)-square.

    Block j holds the j-th newest word, most significant coordinate
    first; the last block is the oldest word truncated to its w - r live
    coordinates.  Rows are output coordinates, so this matrix times a
    canonical state vector is the stepped state — it must agree with the
    probe-extracted matrix of a generator running the same recurrence.
    """
    n, m, w, r, a = spec.n, spec.m, spec.w, spec.r, spec.a
    dim = spec.dim
    rows = [0] * dim

    def z_col(p: int) -> int:
        # w-coordinate splice feeding the twist: top w-r coordinates from
        # the oldest block, low r coordinates from the second-oldest.
        if p < w - r:
            return (n - 1) * w + p
        return (n - 2) * w + p

    # new block 0: twist of the splice plus the tap block n-1-m
    for q in range(w):
        row = 1 << ((n - 1 - m) * w + q)
        if q >= 1:
            row ^= 1 << z_col(q - 1)
        if (a >> (w - 1 - q)) & 1:
            row ^= 1 << z_col(w - 1)
        rows[q] = row
    # blocks 1..n-2 shift down
    for j in range(1, n - 1):
        for q in range(w):
            rows[j * w + q] = 1 << ((j - 1) * w + q)
    # the new oldest block keeps the top w-r coordinates of block n-2
    for q in range(w - r):
        rows[(n - 1) * w + q] = 1 << ((n - 2) * w + q)
    return BitMatrix.from_int_rows(rows, dim)


# -- exact brute-force characteristic polynomials -------------------------


def det_int(mat: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    n = len(mat)
    if n == 0:
        return 1
    m = [[int(x) for x in row] for row in mat]
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for c in range(n - 1):
        if m[c][c] == 0:
            for rr in range(c + 1, n):
                if m[rr][c]:
                    m[c], m[rr] = m[rr], m[c]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[c][c]
        for i in range(c + 1, n):
            mic = m[i][c]
            row_i = m[i]
            row_c = m[c]
            for j in range(c + 1, n):
                row_i[j] = (row_i[j] * pivot - mic * row_c[j]) // prev
            row_i[c] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def _as_dense(mat: Sequence[Sequence[int]] | BitMatrix) -> list[list[int]]:
    if isinstance(mat, BitMatrix):
        return mat.to_dense().tolist()
    return [[int(x) for x in row] for row in mat]


def brute_charpoly(mat: Sequence[Sequence[int]] | BitMatrix) -> ZPoly:
    """det(tI - M) exactly, by determinant evaluation at integer points
    and Lagrange interpolation (all arithmetic exact)."""
    mat = _as_dense(mat)
    dim = len(mat)
    if dim > ORACLE_DIM_LIMIT:
        raise ValueError(f"matrix dimension {dim} exceeds oracle limit {ORACLE_DIM_LIMIT}")
    xs = list(range(dim + 1))
    ys = []
    for x in xs:
        shifted = [
            [(x if i == j else 0) - mat[i][j] for j in range(dim)] for i in range(dim)
        ]
        ys.append(det_int(shifted))

    # full = prod (t - x_i), integer coefficients, ascending
    full = [1]
    for x in xs:
        full = [0] + full
        for d in range(len(full) - 1):
            full[d] -= x * full[d + 1]
    coeffs = [Fraction(0)] * (dim + 1)
    for j, (xj, yj) in enumerate(zip(xs, ys)):
        if yj == 0:
            continue
        # basis = full / (t - xj) by synthetic division, exact
        basis = [0] * (dim + 1)
        carry = 0
        for d in range(dim, -1, -1):
            carry = full[d + 1] + xj * carry
            basis[d] = carry
        denom = 1
        for i, xi in enumerate(xs):
            if i != j:
                denom *= xj - xi
        scale = Fraction(yj, denom)
        for d in range(dim + 1):
            if basis[d]:
                coeffs[d] += scale * basis[d]
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise ArithmeticError("interpolation produced a non-integer coefficient")
        out.append(int(c))
    return ZPoly.from_dense(out)


def fl_charpoly(mat: Sequence[Sequence[int]] | BitMatrix) -> ZPoly:
    """det(tI - M) by the Faddeev-LeVerrier recurrence; cross-oracle for
    ``brute_charpoly`` at small dimensions (cost grows as dim^4)."""
    mat = _as_dense(mat)
    dim = len(mat)
    coeffs = [0] * (dim + 1)
    coeffs[dim] = 1
    aux = [[0] * dim for _ in range(dim)]  # M_0 = 0
    for kk in range(1, dim + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k) / k
        for i in range(dim):
            aux[i][i] += coeffs[dim - kk + 1]
        prod = [
            [sum(mat[i][l] * aux[l][j] for l in range(dim)) for j in range(dim)]
            for i in range(dim)
        ]
        tr = sum(prod[i][i] for i in range(dim))
        if tr % kk:
            raise ArithmeticError("non-integer trace step")
        coeffs[dim - kk] = -tr // kk
        aux = prod
    return ZPoly.from_dense(coeffs)
