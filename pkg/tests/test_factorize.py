# tests/test_factorize.py - Two-idempotent witnesses and agreement with the exhaustive census
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.core.chainring import ChainRing, RingSpec
from src.core.mat2 import Mat2, MatrixRing2
from src.core.quaternion import QuaternionRing
from src.intelligence.census import CarrierTarget, CensusRunner
from src.intelligence.factorize import IdempotentFactorizer, Witness
from src.utils.errors import WitnessVerificationError

Z9 = ChainRing(RingSpec.zpn(3, 2))
FACT9 = IdempotentFactorizer(Z9)
M9 = FACT9.matrices
matrices_z9 = st.integers(0, M9.size() - 1).map(M9.from_index)


def _assert_witness(M: MatrixRing2, witness: Witness, A: Mat2):
    assert M.is_idempotent(witness.e1)
    assert M.is_idempotent(witness.e2)
    assert M.mat_mul(witness.e1, witness.e2) == A


# ========== LEFT KERNEL ==========

def test_left_kernel_examples(z9):
    fact = IdempotentFactorizer(z9)
    M = fact.matrices
    assert fact.find_left_kernel_unimodular(M.from_rows([[1, 1], [0, 0]])) == (z9.zero, z9.one)
    assert fact.find_left_kernel_unimodular(M.identity()) is None
    assert fact.find_left_kernel_unimodular(M.scalar(z9.element(3))) is None


# ========== M(a, b) ==========

def test_factor_m_field_example(f3):
    fact = IdempotentFactorizer(f3)
    M = fact.matrices
    w = fact.factor_m(f3.one, f3.one)
    assert w.e1 == M.from_rows([[1, 0], [0, 0]])
    assert w.e2 == M.from_rows([[1, 1], [0, 0]])


def test_factor_m_zero(z9):
    fact = IdempotentFactorizer(z9)
    w = fact.factor_m(z9.zero, z9.zero)
    assert w.e1 == w.e2 == fact.matrices.zero()


def test_factor_m_valuation_case(z9):
    fact = IdempotentFactorizer(z9)
    M = fact.matrices
    e = z9.element
    w = fact.factor_m(e(3), e(1))
    # l = 1 >= k = 0: lower-left entry is (1 - 3) * 3 = 3
    assert w.e2 == M.from_rows([[3, 1], [3, 7]])
    _assert_witness(M, w, M.m_of(e(3), e(1)))


def test_factor_m_uses_conjugator_when_b_has_higher_valuation(z9):
    fact = IdempotentFactorizer(z9)
    e = z9.element
    w = fact.factor_m(e(1), e(3))
    assert len(w.conjugators) == 1
    _assert_witness(fact.matrices, w, fact.matrices.m_of(e(1), e(3)))


def test_factor_m_zero_b_with_radical_a(z27):
    fact = IdempotentFactorizer(z27)
    M = fact.matrices
    e = z27.element
    w = fact.factor_m(e(3), z27.zero)
    # t = 1 - x^(n-l) = 1 - 9
    assert w.conjugators == (M.from_rows([[1, 19], [0, 1]]),)
    _assert_witness(M, w, M.m_of(e(3), z27.zero))


@pytest.mark.parametrize("name", ["f3", "z4", "z9", "z27", "gf9"])
def test_factor_m_every_pair(name, request):
    ring = request.getfixturevalue(name)
    fact = IdempotentFactorizer(ring)
    M = fact.matrices
    for a in ring.enumerate_elements():
        for b in ring.enumerate_elements():
            _assert_witness(M, fact.factor_m(a, b), M.m_of(a, b))


# ========== MATRICES ==========

def test_identity_and_idempotents(z9):
    fact = IdempotentFactorizer(z9)
    M = fact.matrices
    w = fact.is_product_of_two_idempotents_mat(M.identity())
    assert w.e1 == w.e2 == M.identity()
    E = M.from_rows([[1, 1], [0, 0]])
    w = fact.is_product_of_two_idempotents_mat(E)
    assert (w.e1, w.e2) == (E, M.identity())


def test_lower_nilpotent(z9):
    fact = IdempotentFactorizer(z9)
    M = fact.matrices
    A = M.from_rows([[0, 0], [1, 0]])
    w = fact.is_product_of_two_idempotents_mat(A)
    assert w is not None
    _assert_witness(M, w, A)


def test_scalar_radical_matrix_is_not_a_product(z9):
    fact = IdempotentFactorizer(z9)
    assert fact.is_product_of_two_idempotents_mat(fact.matrices.scalar(z9.element(3))) is None


def test_verify_rejects_bad_witness(z9):
    fact = IdempotentFactorizer(z9)
    M = fact.matrices
    bad = Witness(M.identity(), M.from_rows([[2, 0], [0, 0]]))
    with pytest.raises(WitnessVerificationError):
        fact.verify(bad, M.from_rows([[2, 0], [0, 0]]))


@pytest.mark.parametrize("name,closure_name", [("f3", "closure_f3"), ("z9", "closure_z9")])
def test_decision_matches_census(name, closure_name, request):
    ring = request.getfixturevalue(name)
    closure = request.getfixturevalue(closure_name)
    fact = IdempotentFactorizer(ring)
    M = fact.matrices
    for code in range(M.size()):
        A = M.from_index(code)
        witness = fact.is_product_of_two_idempotents_mat(A)
        assert (witness is not None) == (code in closure.final)
        if witness is not None:
            _assert_witness(M, witness, A)
            assert A == M.identity() or fact.find_left_kernel_unimodular(A) is not None


def test_decision_matches_census_z4(z4):
    closure = CensusRunner(z4).brute_products_census(CarrierTarget.M2)
    fact = IdempotentFactorizer(z4)
    M = fact.matrices
    for code in range(M.size()):
        assert (fact.is_product_of_two_idempotents_mat(M.from_index(code)) is not None) == (code in closure.final)


@pytest.mark.slow
def test_decision_matches_census_z25(z25):
    closure = CensusRunner(z25).brute_products_census(CarrierTarget.M2)
    fact = IdempotentFactorizer(z25)
    M = fact.matrices
    for code in range(M.size()):
        witness = fact.is_product_of_two_idempotents_mat(M.from_index(code))
        assert (witness is not None) == (code in closure.final)


@settings(max_examples=150, deadline=None)
@given(matrices_z9, matrices_z9)
def test_decision_is_conjugation_invariant(P, A):
    assume(M9.is_invertible(P))
    before = FACT9.is_product_of_two_idempotents_mat(A) is not None
    after = FACT9.is_product_of_two_idempotents_mat(M9.conjugate(P, A)) is not None
    assert before == after


def test_extracted_forms_share_an_orbit(f3):
    """Any two kernel rows of A give M(a, b) forms in the same orbit"""
    fact = IdempotentFactorizer(f3)
    M = fact.matrices
    zero_row = (f3.zero, f3.zero)
    for A in M.enumerate():
        rows = [w for w in M.unimodular_representatives() if M.row_times(w, A) == zero_row]
        forms = [M.conjugate(M.complete_unimodular(w), A) for w in rows]
        for B in forms:
            assert (B.e21, B.e22) == zero_row
            assert M.same_orbit_m(forms[0].e11, forms[0].e12, B.e11, B.e12)


# ========== QUATERNIONS ==========

def test_quaternion_one(z9):
    fact = IdempotentFactorizer(z9)
    H = fact.quaternions
    w = fact.is_product_of_idempotents(H.one())
    assert (w.e1, w.e2) == (H.one(), H.one())


def test_local_case(z4):
    fact = IdempotentFactorizer(z4)
    H = fact.quaternions
    assert fact.is_product_of_idempotents(H.make(1, 1, 0, 0)) is None
    assert fact.is_product_of_idempotents(H.one()).e1 == H.one()
    w = fact.is_product_of_idempotents(H.zero(), r_bound=3)
    assert (w.e1, w.e2, w.r_bound) == (H.zero(), H.zero(), 3)


def test_quaternion_witness_is_verified(z9):
    fact = IdempotentFactorizer(z9)
    H = fact.quaternions
    x = fact.iso.from_matrix(fact.matrices.from_rows([[0, 0], [1, 0]]))
    w = fact.factor(x)
    assert H.q_is_idempotent(w.e1) and H.q_is_idempotent(w.e2)
    assert H.q_mul(w.e1, w.e2) == x


@pytest.mark.slow
def test_quaternion_products_z9(z9):
    fact = IdempotentFactorizer(z9)
    H = QuaternionRing(z9)
    assert sum(1 for x in H.enumerate() if fact.is_product_of_idempotents(x) is not None) == 898


@pytest.mark.parametrize("name", ["z4", "f2_y2", "gr4"])
def test_local_decision_matches_census(name, request):
    ring = request.getfixturevalue(name)
    closure = CensusRunner(ring).brute_products_census(CarrierTarget.H)
    assert closure.sizes == [2]
    assert closure.stable_at == 1
    fact = IdempotentFactorizer(ring)
    H = fact.quaternions
    for code in range(H.size()):
        witness = fact.is_product_of_idempotents(H.from_index(code))
        assert (witness is not None) == (code in closure.final)
