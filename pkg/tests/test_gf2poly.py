"""GF(2) polynomial arithmetic, Berlekamp-Massey, jump-ahead."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from f2spectra import get_spec, make_generator
from f2spectra.bitlinalg import BitVector
from f2spectra.gf2poly import (
    GF2Poly,
    apply_transition_polynomial,
    berlekamp_massey,
    find_low_weight_state,
    format_minpoly,
    jump_ahead,
    jump_polynomial,
    minimal_polynomial,
    output_bit_sequence,
    parse_minpoly,
)

N1_TABLE = {
    "mt19937": 135,
    "mt19937-64id1": 285,
    "mt19937-64id3": 5795,
    "well607b": 313,
    "well1024a": 407,
    "well19937a": 8585,
    "melg607": 313,
    "melg19937": 9603,
}


def _poly_from_int(bits: int) -> GF2Poly:
    return GF2Poly.from_degrees(i for i in range(bits.bit_length()) if (bits >> i) & 1)


# -- polynomial algebra -------------------------------------------------------


def test_constructors_and_coeffs():
    p = GF2Poly.from_degrees([0, 3, 5])
    assert p.degree == 5
    assert p.weight == 3
    assert [p.coeff(i) for i in range(6)] == [1, 0, 0, 1, 0, 1]
    assert GF2Poly.x_power(4).degree == 4
    assert not GF2Poly.from_degrees([])


def test_add_mul_are_gf2():
    a = GF2Poly.from_degrees([0, 1, 4])
    assert a + a == GF2Poly.from_degrees([])
    b = GF2Poly.from_degrees([1, 2])
    # (1+x+x^4)(x+x^2) = x + x^3 + x^5 + x^6
    assert a * b == GF2Poly.from_degrees([1, 3, 5, 6])


@settings(max_examples=50, deadline=None)
@given(
    a=st.integers(min_value=1, max_value=2**96 - 1),
    b=st.integers(min_value=1, max_value=2**96 - 1),
)
def test_divmod_identity(a, b):
    pa, pb = _poly_from_int(a), _poly_from_int(b)
    q, r = divmod(pa, pb)
    assert q * pb + r == pa
    assert (not r) or r.degree < pb.degree
    assert pa % pb == r and pa // pb == q


def test_square_and_pow_mod():
    rng = random.Random(9)
    mod = _poly_from_int(rng.getrandbits(40) | (1 << 40) | 1)
    p = _poly_from_int(rng.getrandbits(39) | 1)
    assert p.square() == p * p
    naive = GF2Poly.from_degrees([0])
    for _ in range(13):
        naive = (naive * p) % mod
    assert p.pow_mod(13, mod) == naive
    assert p.pow_mod(0, mod) == GF2Poly.from_degrees([0])


def test_reciprocal():
    p = GF2Poly.from_degrees([0, 2, 5])
    assert p.reciprocal() == GF2Poly.from_degrees([5, 3, 0])
    assert p.reciprocal().reciprocal() == p


def test_hex_roundtrip():
    p = GF2Poly.from_degrees([0, 1, 64, 129])
    assert GF2Poly.from_hex(p.to_hex()) == p


# -- Berlekamp-Massey ---------------------------------------------------------


def test_bm_recovers_short_lfsr():
    # s[n] = s[n-3] ^ s[n-4], seeded 1,0,0,0 -> maximal 15-periodic sequence
    seq = [1, 0, 0, 0]
    for n in range(4, 60):
        seq.append(seq[n - 3] ^ seq[n - 4])
    packed = sum(bit << i for i, bit in enumerate(seq))
    conn = berlekamp_massey(packed, len(seq))
    assert conn.degree == 4
    assert conn.coeff(0) == 1
    # the reciprocal annihilates the sequence at every offset
    annihilator = conn.reciprocal()
    taps = [i for i in range(5) if annihilator.coeff(i)]
    for t in range(0, 40):
        assert sum(seq[t + i] for i in taps) % 2 == 0


def test_bm_handles_all_zero_prefix():
    # the zero sequence needs no taps: the connection polynomial is 1
    assert berlekamp_massey(0, 32) == GF2Poly.from_degrees([0])


@pytest.mark.parametrize("name", ["well607b", "melg607"])
def test_minimal_polynomial_fresh_equals_bundled(name):
    spec = get_spec(name)
    bundled = minimal_polynomial(spec)
    fresh = minimal_polynomial(spec, use_cache=False)
    assert bundled == fresh
    assert fresh.degree == spec.k
    assert fresh.weight == N1_TABLE[name]


@pytest.mark.parametrize("name", ["well1024a", "melg607"])
def test_minimal_polynomial_annihilates_lsb_stream(name):
    spec = get_spec(name)
    poly = minimal_polynomial(spec)
    nbits = spec.k + poly.degree + 50
    packed = output_bit_sequence(spec, nbits, seed=2021)
    seq = [(packed >> i) & 1 for i in range(nbits)]
    taps = [i for i in range(poly.degree + 1) if poly.coeff(i)]
    for t in range(0, nbits - poly.degree, 97):
        assert sum(seq[t + i] for i in taps) % 2 == 0


def test_minpoly_file_roundtrip(tmp_path):
    spec = get_spec("well607b")
    poly = minimal_polynomial(spec)
    text = format_minpoly(spec.name, 12345, poly)
    header, parsed = parse_minpoly(text)
    assert parsed == poly
    assert header["generator"] == spec.name
    assert header["seed"] == 12345


# -- jump-ahead ---------------------------------------------------------------


@pytest.mark.parametrize("name", ["well607b", "melg607"])
@pytest.mark.parametrize("steps", [0, 1, 2, 607, 12345])
def test_jump_matches_stepping(name, steps):
    spec = get_spec(name)
    jumper = make_generator(spec, seed=31)
    walker = make_generator(spec, seed=31)
    jump_ahead(jumper, steps)
    for _ in range(steps):
        walker.next_word()
    assert [jumper.next_word() for _ in range(5)] == [walker.next_word() for _ in range(5)]


def test_jump_is_additive_far_beyond_stepping_range():
    spec = get_spec("well1024a")
    a = make_generator(spec, seed=8)
    b = make_generator(spec, seed=8)
    jump_ahead(a, 2**97 + 11)
    jump_ahead(a, 2**40 + 3)
    jump_ahead(b, 2**97 + 2**40 + 14)
    assert a.state_vector() == b.state_vector()


def test_jump_polynomial_reduces_mod_minpoly():
    spec = get_spec("well607b")
    poly = jump_polynomial(spec, 2**80)
    assert poly.degree < spec.k


def test_apply_polynomial_x_is_one_step():
    spec = get_spec("melg607")
    gen = make_generator(spec, seed=77)
    twin = make_generator(spec, seed=77)
    apply_transition_polynomial(gen, GF2Poly.x_power(1))
    twin.step()
    assert gen.state_vector() == twin.state_vector()


# -- low-weight predecessor states --------------------------------------------


def test_find_low_weight_state_reaches_the_unit_corner():
    spec = get_spec("well607b")
    d = 120
    vec = find_low_weight_state(spec, d)
    gen = make_generator(spec)
    gen.set_state_vector(vec)
    for _ in range(d):
        gen.step()
    assert gen.state_vector() == BitVector.unit(spec.k, 0)


def test_find_low_weight_state_validates_range():
    spec = get_spec("well607b")
    with pytest.raises(ValueError):
        find_low_weight_state(spec, -1)
    with pytest.raises(ValueError):
        find_low_weight_state(spec, (1 << spec.k) - 1)
