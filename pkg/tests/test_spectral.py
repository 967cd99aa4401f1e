"""Real eigenvalue spectra and the contraction-entropy report."""

from __future__ import annotations

import io
import json
import math
import random

import numpy as np
import pytest

from f2spectra import get_spec
from f2spectra.bitlinalg import BitMatrix, extract_transition_matrix
from f2spectra.spectral import (
    BOUNDARY_TOL,
    DEFAULT_EIGEN_CAP,
    SingularSpectrumError,
    Spectrum,
    entropy,
    eigenvalues,
    histogram_csv,
    modulus_histogram,
    nonzero_block_count,
    power_spectrum,
    real_matpow,
    spectrum_csv,
    to_real_matrix,
)


def _random_bitmatrix(dim: int, seed: int) -> BitMatrix:
    rng = random.Random(seed)
    return BitMatrix.from_int_rows((rng.getrandbits(dim) for _ in range(dim)), dim)


# -- dense conversion ----------------------------------------------------------


def test_to_real_matrix_roundtrip():
    m = _random_bitmatrix(70, 13)
    dense = to_real_matrix(m)
    assert dense.dtype == np.float64
    assert dense.flags["F_CONTIGUOUS"]
    assert dense.astype(np.uint8).tolist() == m.to_dense().tolist()


# -- eigensolves ----------------------------------------------------------------


def test_swap_matrix_spectrum():
    spec = eigenvalues(BitMatrix.from_int_rows([0b10, 0b01], 2), source="swap")
    assert sorted(v.real for v in spec.eigenvalues) == pytest.approx([-1.0, 1.0])
    assert spec.source == "swap" and spec.power == 1 and spec.k == 2


def test_golden_ratio_entropy():
    # [[1,1],[1,0]] contracts along one direction at rate 1/phi
    spec = eigenvalues(BitMatrix.from_int_rows([0b11, 0b01], 2))
    report = entropy(spec, w=2)
    golden = (1 + math.sqrt(5)) / 2
    assert report.h == pytest.approx(math.log(golden), abs=1e-12)
    assert report.h_per_bit == pytest.approx(math.log(golden) / 2, abs=1e-12)
    assert report.count_inside == 1
    assert report.count_outside == 1


def test_identity_has_zero_entropy_and_empty_tails():
    report = entropy(eigenvalues(BitMatrix.identity(8)), w=1)
    assert report.h == 0.0
    assert report.count_inside == 0 and report.count_outside == 0
    assert report.min_modulus == pytest.approx(1.0)


def test_eigenvalue_cap():
    big = BitMatrix.identity(DEFAULT_EIGEN_CAP + 1)
    with pytest.raises(ValueError):
        eigenvalues(big)
    spec = eigenvalues(big, cap=DEFAULT_EIGEN_CAP + 1)
    assert spec.k == DEFAULT_EIGEN_CAP + 1


def test_singular_matrix_is_rejected():
    with pytest.raises(SingularSpectrumError):
        eigenvalues(BitMatrix.zeros(3, 3))


def test_ndarray_input():
    arr = np.array([[0.0, 2.0], [0.5, 0.0]])
    spec = eigenvalues(arr)
    assert sorted(np.abs(spec.eigenvalues)) == pytest.approx([1.0, 1.0])


# -- powers ---------------------------------------------------------------------


def test_power_spectrum_identity_is_noop():
    spec = eigenvalues(_random_bitmatrix(12, 3))
    assert power_spectrum(spec, 1) is spec


def test_power_spectrum_matches_matrix_power():
    m = _random_bitmatrix(16, 4)
    base = eigenvalues(m)
    powered = power_spectrum(base, 5)
    assert powered.power == 5
    direct = eigenvalues(real_matpow(m, 5), source=base.source)
    assert sorted(np.abs(powered.eigenvalues)) == pytest.approx(
        sorted(np.abs(direct.eigenvalues)), rel=1e-9
    )


def test_entropy_respects_the_power_law():
    m = _random_bitmatrix(24, 5)
    spec = eigenvalues(m)
    h1 = entropy(spec, w=1).h
    h6 = entropy(power_spectrum(spec, 6), w=1).h
    assert h6 == pytest.approx(6 * h1, rel=1e-12)


def test_real_matpow_guards_against_float_overflow():
    ones = BitMatrix.from_int_rows([0b11, 0b11], 2)
    assert real_matpow(ones, 10).max() == 2.0**9
    with pytest.raises(OverflowError):
        real_matpow(ones, 60)


# -- report ----------------------------------------------------------------------


def test_entropy_resolves_word_size_from_known_source():
    spec = eigenvalues(extract_transition_matrix(get_spec("well607b")), source="well607b")
    report = entropy(spec)
    assert report.name == "well607b"
    assert report.w == 32
    assert report.k == 607
    assert report.h == pytest.approx(report.h_per_bit * 32, rel=1e-12)


def test_entropy_json_fields():
    report = entropy(eigenvalues(BitMatrix.identity(4)), w=2, name="eye")
    payload = json.loads(report.to_json())
    assert set(payload) == {
        "name", "k", "w", "h", "h_per_bit", "min_modulus", "max_modulus", "power",
    }
    assert payload["name"] == "eye" and payload["k"] == 4 and payload["w"] == 2


def test_entropy_boundary_band_is_excluded():
    values = np.array([1.0 - BOUNDARY_TOL / 2, 1.0 + BOUNDARY_TOL / 2, 0.5, 2.0])
    spec = Spectrum(eigenvalues=values.astype(np.complex128), source="", power=1)
    report = entropy(spec, w=1)
    assert report.count_inside == 1 and report.count_outside == 1
    assert report.h == pytest.approx(-math.log(0.5), rel=1e-12)


# -- tabular output ---------------------------------------------------------------


def test_spectrum_csv_parses_back():
    spec = eigenvalues(_random_bitmatrix(10, 9))
    sink = io.StringIO()
    spectrum_csv(spec, sink)
    lines = sink.getvalue().strip().split("\n")
    assert lines[0] == "re,im,modulus"
    assert len(lines) == 11
    re, im, mod = map(float, lines[1].split(","))
    assert mod == pytest.approx(math.hypot(re, im), rel=1e-12)


def test_modulus_histogram_counts_everything():
    spec = eigenvalues(_random_bitmatrix(32, 7))
    table = modulus_histogram(spec, bins=8)
    assert len(table) == 8
    assert sum(count for _, _, count in table) == 32
    sink = io.StringIO()
    histogram_csv(table, sink)
    assert sink.getvalue().startswith("bin_low,bin_high,count\n")


def test_modulus_histogram_degenerate_spread():
    spec = eigenvalues(BitMatrix.identity(5))
    table = modulus_histogram(spec, bins=4)
    assert table == [(1.0, 1.0, 5)]


def test_nonzero_block_count():
    spec = get_spec("well607b")
    mat = extract_transition_matrix(spec)
    blocks = nonzero_block_count(mat, spec.w)
    grid = -(-spec.k // spec.w)
    assert 0 < blocks <= grid * grid
