"""Eigenvalue spectra and entropy statistics of transition matrices.

A k-bit linear generator advances its state with a 0/1 matrix B.  Seen
as a real matrix, B has k complex eigenvalues; the positive part of the
log-modulus sum (equivalently, minus the sum over the contracting ones
— the matrix has |det| = 1 in the invertible full-period case) measures
how fast state-space volume is stretched per step.  This module
computes full dense spectra, the entropy

    h = - sum over |lambda| < 1 of ln |lambda|,

and the CSV/JSON views downstream tooling consumes.

The eigensolver is a standard dense nonsymmetric solve (balancing +
Hessenberg reduction + shifted QR) provided by LAPACK through SciPy;
everything asserted about the results is cross-checked elsewhere by
exact integer oracles (determinant products, matrix powers) at small
dimensions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np
import scipy.linalg

from .bitlinalg import BitMatrix

#: Eigensolves above this dimension are refused unless the caller
#: raises the cap explicitly (dense O(k^3) work: 19937 takes hours).
DEFAULT_EIGEN_CAP = 4096

#: Moduli at or below this are treated as numerically singular.
SINGULAR_MODULUS = 1e-12

#: Half-width of the exclusion band around modulus 1: eigenvalues with
#: |lambda| >= 1 - BOUNDARY_TOL do not count as contracting.
BOUNDARY_TOL = 1e-12


class EigensolveError(RuntimeError):
    """The dense eigensolver failed to converge."""


class SingularSpectrumError(ValueError):
    """An eigenvalue modulus is ~0: the matrix is numerically singular.

    Full-period transition matrices are invertible, so this signals a
    broken matrix (extraction or assembly bug), not a property of the
    generator.
    """


@dataclass(frozen=True)
class Spectrum:
    """Full complex spectrum of a transition matrix power.

    ``power`` records which matrix power the eigenvalues belong to
    (1 for B itself, n for B^n views).
    """

    eigenvalues: np.ndarray
    source: str = ""
    power: int = 1

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)


@dataclass(frozen=True)
class EntropyReport:
    """Entropy statistics of a spectrum.

    ``count_inside`` counts eigenvalues strictly inside the unit circle
    (below the boundary band), ``count_outside`` strictly outside it;
    eigenvalues within BOUNDARY_TOL of modulus 1 belong to neither.
    """

    name: str
    k: int
    w: int
    h: float
    h_per_bit: float
    min_modulus: float
    max_modulus: float
    count_inside: int
    count_outside: int
    power: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "k": self.k,
                "w": self.w,
                "h": self.h,
                "h_per_bit": self.h_per_bit,
                "min_modulus": self.min_modulus,
                "max_modulus": self.max_modulus,
                "power": self.power,
            }
        )


def to_real_matrix(mat: BitMatrix, order: str = "F") -> np.ndarray:
    """The 0/1 matrix as float64, column-major by default so the
    eigensolver can work in place without an extra k-square copy."""
    out = np.empty((mat.rows, mat.cols), dtype=np.float64, order=order)
    packed = mat.storage.view(np.uint8).reshape(mat.rows, -1)
    for i in range(mat.rows):
        bits = np.unpackbits(packed[i], bitorder="little")
        out[i, :] = bits[: mat.cols]
    return out


def eigenvalues(
    mat: BitMatrix | np.ndarray,
    source: str = "",
    power: int = 1,
    cap: int = DEFAULT_EIGEN_CAP,
) -> Spectrum:
    """Full complex spectrum of a real square matrix.

    Accepts a 0/1 ``BitMatrix`` or any real ndarray.  The ndarray is
    consumed (overwritten) when it is float64 and column-major;
    otherwise a working copy is made.
    """
    if isinstance(mat, BitMatrix):
        if mat.rows != mat.cols:
            raise ValueError("matrix must be square")
        dim = mat.rows
        if dim > cap:
            raise ValueError(
                f"dimension {dim} exceeds the eigensolve cap {cap}; "
                "raise the cap explicitly for long dense solves"
            )
        work = to_real_matrix(mat)
    else:
        arr = np.asarray(mat)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("matrix must be square")
        dim = arr.shape[0]
        if dim > cap:
            raise ValueError(
                f"dimension {dim} exceeds the eigensolve cap {cap}; "
                "raise the cap explicitly for long dense solves"
            )
        work = np.asfortranarray(arr, dtype=np.float64)
        if work is arr:
            work = work.copy(order="F")
    try:
        vals = scipy.linalg.eigvals(work, overwrite_a=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigensolveError(f"eigensolver failed to converge at dimension {dim}") from exc
    spectrum = Spectrum(eigenvalues=vals, source=source, power=power)
    if spectrum.k and float(np.min(np.abs(vals))) <= SINGULAR_MODULUS:
        raise SingularSpectrumError(
            "eigenvalue modulus at or below 1e-12: matrix is numerically singular"
        )
    return spectrum


def power_spectrum(spectrum: Spectrum, n: int) -> Spectrum:
    """Spectrum of the n-th matrix power: each eigenvalue to the n-th."""
    if n < 1:
        raise ValueError("power must be >= 1")
    if n == 1:
        return spectrum
    return Spectrum(
        eigenvalues=spectrum.eigenvalues**n,
        source=spectrum.source,
        power=spectrum.power * n,
    )


def entropy(spectrum: Spectrum, w: int | None = None, name: str | None = None) -> EntropyReport:
    """Entropy report: h = - sum of ln|lambda| over contracting eigenvalues.

    ``w`` is the word size used for the per-bit rate; when omitted it is
    resolved from the source generator name, falling back to 1 for
    anonymous matrices.
    """
    if spectrum.k == 0:
        raise ValueError("spectrum is empty")
    if w is None:
        w = _resolve_word_size(spectrum.source)
    if w < 1:
        raise ValueError("word size must be >= 1")
    moduli = spectrum.moduli()
    if float(np.min(moduli)) <= SINGULAR_MODULUS:
        raise SingularSpectrumError(
            "eigenvalue modulus at or below 1e-12: entropy diverges"
        )
    inside = moduli < 1.0 - BOUNDARY_TOL
    outside = moduli > 1.0 + BOUNDARY_TOL
    h = float(-np.sum(np.log(moduli[inside]))) if np.any(inside) else 0.0
    return EntropyReport(
        name=name if name is not None else spectrum.source,
        k=spectrum.k,
        w=w,
        h=h,
        h_per_bit=h / w,
        min_modulus=float(np.min(moduli)),
        max_modulus=float(np.max(moduli)),
        count_inside=int(np.count_nonzero(inside)),
        count_outside=int(np.count_nonzero(outside)),
        power=spectrum.power,
    )


def _resolve_word_size(source: str) -> int:
    if source:
        from .generators import get_spec

        try:
            return get_spec(source).w
        except KeyError:
            pass
    return 1


def real_matpow(mat: BitMatrix, n: int) -> np.ndarray:
    """The n-th power of the 0/1 matrix over the integers, carried in
    float64.

    Square-and-multiply with an exactness guard: every intermediate
    entry must stay below 2^53, where float64 still represents integers
    exactly.  Raises OverflowError once entries outgrow that range.
    """
    if n < 1:
        raise ValueError("power must be >= 1")
    base = to_real_matrix(mat, order="C")

    def checked(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = a @ b
        if float(out.max(initial=0.0)) >= 2.0**53:
            raise OverflowError(
                "integer matrix power exceeds exact float64 range (2^53)"
            )
        return out

    result: np.ndarray | None = None
    square = base
    e = n
    while True:
        if e & 1:
            result = square.copy() if result is None else checked(result, square)
        e >>= 1
        if not e:
            break
        square = checked(square, square)
    assert result is not None
    return result


def nonzero_block_count(mat: BitMatrix, w: int) -> int:
    """Number of w-square blocks of the matrix containing any 1 (the
    last block row/column may be narrower when w does not divide the
    dimension)."""
    if w < 1:
        raise ValueError("block size must be >= 1")
    rows_blocks = (mat.rows + w - 1) // w
    cols_blocks = (mat.cols + w - 1) // w
    count = 0
    for bi in range(rows_blocks):
        row_ints = [mat.row_int(i) for i in range(bi * w, min((bi + 1) * w, mat.rows))]
        for bj in range(cols_blocks):
            lo = bj * w
            width = min(w, mat.cols - lo)
            mask = ((1 << width) - 1) << lo
            if any(r & mask for r in row_ints):
                count += 1
    return count


# -- tabular views ----------------------------------------------------------


def spectrum_csv(spectrum: Spectrum, sink: TextIO) -> None:
    """CSV with one eigenvalue per row: re, im, modulus."""
    sink.write("re,im,modulus\n")
    vals = spectrum.eigenvalues
    moduli = np.abs(vals)
    for v, m in zip(vals, moduli):
        sink.write(f"{float(v.real)!r},{float(v.imag)!r},{float(m)!r}\n")


def modulus_histogram(
    spectrum: Spectrum, bins: int
) -> list[tuple[float, float, int]]:
    """Histogram of eigenvalue moduli covering [min, max] in equal bins;
    rows are (bin_low, bin_high, count)."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    moduli = spectrum.moduli()
    lo = float(np.min(moduli))
    hi = float(np.max(moduli))
    if hi == lo:
        return [(lo, hi, len(moduli))]
    counts, edges = np.histogram(moduli, bins=bins, range=(lo, hi))
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)
    ]


def histogram_csv(table: Sequence[tuple[float, float, int]], sink: TextIO) -> None:
    sink.write("bin_low,bin_high,count\n")
    for lo, hi, count in table:
        sink.write(f"{lo!r},{hi!r},{count}\n")
