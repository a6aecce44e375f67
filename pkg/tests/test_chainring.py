# tests/test_chainring.py - Chain ring construction, arithmetic, valuation and digits
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.chainring import (
    ChainRing,
    RingKind,
    RingSpec,
    format_modulus,
    parse_modulus,
    ring_from_string,
    ring_make,
)
from src.utils.errors import CapExceeded, InvalidModulus, NotAUnit, NotPrime, RingSpecError

GR9 = ChainRing(RingSpec.galois(3, 2, 2, "t^2+1"))
GF9_Y2 = ChainRing(RingSpec.trunc_poly(3, 2, 2, "t^2+1"))
Z125 = ChainRing(RingSpec.zpn(5, 3))


def _el(ring):
    return st.integers(0, ring.size - 1).map(ring.from_index)


# ========== CONSTRUCTION ==========

def test_zpn_parameters(z9):
    assert (z9.q, z9.n, z9.size) == (3, 2, 9)
    assert z9.x == z9.element(3)
    assert [t.coeffs[0] for t in z9.transversal] == [0, 1, 2]


def test_field_case(f3):
    assert (f3.q, f3.n, f3.size) == (3, 1, 3)
    assert f3.x == f3.zero
    assert all(f3.is_unit(a) for a in f3.enumerate_elements() if a != f3.zero)


def test_not_prime():
    with pytest.raises(NotPrime):
        ring_make("zpn:p=4,n=1")


@pytest.mark.parametrize("text", [
    "tp:p=3,r=2,n=1,f=t^2+2",      # (t-1)(t+1)
    "tp:p=3,r=2,n=1,f=2*t^2+1",    # not monic
    "tp:p=3,r=2,n=1,f=t^3+t+1",    # wrong degree
    "gr:p=3,l=2,r=2,f=t^2+2",
])
def test_invalid_modulus(text):
    with pytest.raises(InvalidModulus):
        ring_make(text)


@pytest.mark.parametrize("text", [
    "zpn:p=3",
    "foo:p=3,n=2",
    "zpn:p=3,n=x",
    "zpn p=3,n=2",
    "zpn:p=3,n=2,r=1",
    "tp:p=3,r=2,n=1",
    "zpn:p=3,n=0",
])
def test_bad_spec_strings(text):
    with pytest.raises(RingSpecError):
        ring_make(text)


@pytest.mark.parametrize("text", [
    "zpn:p=3,n=2",
    "tp:p=3,r=2,n=1,f=t^2+1",
    "tp:p=2,r=2,n=2,f=t^2+t+1",
    "gr:p=3,l=2,r=2,f=t^2+1",
])
def test_spec_string_round_trip(text):
    spec = RingSpec.parse(text)
    assert spec.to_string() == text
    assert RingSpec.parse(spec.to_string()) == spec


def test_modulus_parsing():
    assert parse_modulus("t^2+1") == (1, 0, 1)
    assert parse_modulus("t^2 + 2t + 2") == (2, 2, 1)
    assert format_modulus((2, 2, 1)) == "t^2+2*t+2"
    with pytest.raises(RingSpecError):
        parse_modulus("__import__('os')")


def test_truncated_defaults_to_linear_modulus():
    spec = RingSpec.trunc_poly(3, 1, 2)
    assert spec.modulus == (0, 1)
    assert spec.kind is RingKind.TRUNC_POLY


def test_galois_ring(gr9):
    assert (gr9.q, gr9.n, gr9.size) == (9, 2, 81)
    assert gr9.spec.l == 2
    assert gr9.x == gr9.element([3, 0])
    assert len(gr9.transversal) == 9


def test_truncated_polynomial_ring(gf9_y2):
    assert (gf9_y2.q, gf9_y2.n, gf9_y2.size) == (9, 2, 81)
    assert gf9_y2.x != gf9_y2.zero
    assert gf9_y2.mul(gf9_y2.x, gf9_y2.x) == gf9_y2.zero


def test_gf9_is_a_field(gf9):
    nonzero = [a for a in gf9.enumerate_elements() if a != gf9.zero]
    assert len(nonzero) == 8
    assert all(gf9.mul(a, gf9.inv(a)) == gf9.one for a in nonzero)


# ========== ARITHMETIC ==========

def test_z9_examples(z9):
    e = z9.element
    assert z9.mul(e(4), e(7)) == z9.one
    assert z9.inv(e(4)) == e(7)
    with pytest.raises(NotAUnit):
        z9.inv(e(3))


def test_is_unit(z9):
    e = z9.element
    assert z9.is_unit(e(4))
    assert not z9.is_unit(e(6))
    assert not z9.is_unit(z9.zero)


def test_inverse_of_every_unit(all_rings):
    for ring in all_rings:
        for u in ring.enumerate_units():
            assert ring.mul(u, ring.inv(u)) == ring.one


def test_pow(z27):
    e = z27.element
    assert z27.pow(e(2), 0) == z27.one
    assert z27.pow(e(2), 5) == e(5)
    assert z27.pow(e(2), -1) == e(14)


def test_ring_axioms_exhaustive(small_rings):
    for ring in small_rings:
        if ring.size > 27:
            continue
        elements = list(ring.enumerate_elements())
        for a in elements:
            for b in elements:
                assert ring.add(a, b) == ring.add(b, a)
                assert ring.mul(a, b) == ring.mul(b, a)
                assert ring.add(ring.sub(a, b), b) == a
                for c in elements:
                    assert ring.mul(ring.mul(a, b), c) == ring.mul(a, ring.mul(b, c))
                    assert ring.mul(a, ring.add(b, c)) == ring.add(ring.mul(a, b), ring.mul(a, c))


def _assert_axioms_through_tables(ring):
    """Every pair against the exact arithmetic, then every triple through the tables"""
    T = ring.tables
    elements = list(ring.enumerate_elements())
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            assert T.add(i, j) == ring.index(ring.add(a, b))
            assert T.mul(i, j) == ring.index(ring.mul(a, b))

    s = ring.size
    a, b, c = (g.ravel() for g in np.meshgrid(*[np.arange(s, dtype=np.int64)] * 3, indexing="ij"))
    assert np.array_equal(T.mul(T.mul(a, b), c), T.mul(a, T.mul(b, c)))
    assert np.array_equal(T.add(T.add(a, b), c), T.add(a, T.add(b, c)))
    assert np.array_equal(T.mul(a, T.add(b, c)), T.add(T.mul(a, b), T.mul(a, c)))
    assert np.all(T.mul(T.one, np.arange(s)) == np.arange(s))
    assert np.all(T.add(np.arange(s), T.neg) == T.zero)


@pytest.mark.parametrize("name", ["z25", "z81", "gf9_y2", "gr9", "f2_y2", "gr4"])
def test_ring_axioms_exhaustive_up_to_81(name, request):
    _assert_axioms_through_tables(request.getfixturevalue(name))


@pytest.mark.parametrize("ring", [GR9, GF9_Y2, Z125], ids=["gr9", "gf9_y2", "z125"])
def test_ring_axioms_sampled(ring):
    @settings(max_examples=300, deadline=None)
    @given(_el(ring), _el(ring), _el(ring))
    def check(a, b, c):
        assert ring.mul(ring.mul(a, b), c) == ring.mul(a, ring.mul(b, c))
        assert ring.mul(a, ring.add(b, c)) == ring.add(ring.mul(a, b), ring.mul(a, c))
        assert ring.mul(a, b) == ring.mul(b, a)
        assert ring.add(a, ring.neg(a)) == ring.zero

    check()


# ========== VALUATION & STRUCTURE ==========

def test_valuation_examples(z9, z27):
    assert z9.valuation(z9.element(3)) == 1
    assert z9.valuation(z9.zero) == 2
    assert z27.valuation(z27.element(18)) == 2


def test_ideal_sizes(all_rings):
    for ring in all_rings:
        for k in range(ring.n + 1):
            ideal = ring.enumerate_ideal(k)
            assert len(ideal) == ring.q ** (ring.n - k) == ring.ideal_size(k)
            assert all(ring.valuation(a) >= k for a in ideal)
        assert ring.enumerate_ideal(ring.n) == (ring.zero,)
        assert len(list(ring.enumerate_units())) == ring.unit_count()
        assert len({ring.residue_representative(a) for a in ring.enumerate_elements()}) == ring.residue_field_size()


def test_ideal_examples(z9):
    assert [a.coeffs[0] for a in z9.enumerate_ideal(1)] == [0, 3, 6]
    with pytest.raises(RingSpecError):
        z9.enumerate_ideal(3)


def test_units_plus_radical_are_units(all_rings, z81, z729, gf9_y3, f2_y2, gr4):
    for ring in all_rings + [z81, z729, gf9_y3, f2_y2, gr4]:
        radical = ring.enumerate_ideal(1)
        for u in ring.enumerate_units():
            assert all(ring.is_unit(ring.add(u, j)) for j in radical)


def test_valuation_of_products(small_rings):
    for ring in small_rings:
        elements = list(ring.enumerate_elements())
        for a in elements:
            for b in elements:
                expected = min(ring.valuation(a) + ring.valuation(b), ring.n)
                assert ring.valuation(ring.mul(a, b)) == expected


def test_enumeration_is_distinct_and_ordered(all_rings):
    for ring in all_rings:
        elements = list(ring.enumerate_elements())
        assert len(set(elements)) == ring.size
        assert [ring.index(a) for a in elements] == list(range(ring.size))


# ========== UNIT PART & DIGITS ==========

def test_unit_part_examples(z9):
    e = z9.element
    assert z9.unit_part(e(6)) == (e(2), 1)
    assert z9.unit_part(e(4)) == (e(4), 0)
    assert z9.unit_part(z9.zero) == (z9.one, 2)


def test_unit_part_reconstructs(all_rings):
    for ring in all_rings:
        for a in ring.enumerate_elements():
            u, v = ring.unit_part(a)
            assert ring.is_unit(u)
            assert v == ring.valuation(a)
            assert ring.mul(u, ring.x_pow(v)) == a


def test_digit_examples(z9, z27):
    assert [d.coeffs[0] for d in z9.digit_expansion(z9.element(7))] == [1, 2]
    assert [d.coeffs[0] for d in z9.digit_expansion(z9.zero)] == [0, 0]
    assert [d.coeffs[0] for d in z27.digit_expansion(z27.element(25))] == [1, 2, 2]


def test_digit_round_trip(all_rings):
    for ring in all_rings:
        transversal = set(ring.transversal)
        for a in ring.enumerate_elements():
            digits = ring.digit_expansion(a)
            assert len(digits) == ring.n
            assert set(digits) <= transversal
            assert ring.recompose(digits) == a


# ========== TABLES ==========

@pytest.mark.parametrize("name", ["z9", "gf9_y2", "gr9"])
def test_tables_match_exact_arithmetic(name, request):
    ring = request.getfixturevalue(name)
    T = ring.tables
    for a in ring.enumerate_elements():
        i = ring.index(a)
        assert T.neg[i] == ring.index(ring.neg(a))
        assert T.valuation[i] == ring.valuation(a)
        assert bool(T.unit[i]) == ring.is_unit(a)
        for b in list(ring.enumerate_elements())[:9]:
            j = ring.index(b)
            assert T.add(i, j) == ring.index(ring.add(a, b))
            assert T.mul(i, j) == ring.index(ring.mul(a, b))


def test_tables_respect_size_limit(monkeypatch):
    from src.config import IdemQuatConfig
    monkeypatch.setattr(IdemQuatConfig, "TABLE_SIZE_LIMIT", 8)
    ring = ChainRing(RingSpec.zpn(3, 2))
    with pytest.raises(CapExceeded):
        ring.tables


@pytest.mark.parametrize("text", ["zpn:p=3,n=2", "tp:p=3,r=2,n=2,f=t^2+1", "gr:p=3,l=2,r=2,f=t^2+1"])
def test_ring_from_string(text):
    ring = ring_from_string(text)
    assert ring.spec == RingSpec.parse(text)
    assert ring_from_string(ring.spec.to_string()).spec == ring.spec
