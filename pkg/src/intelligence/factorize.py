# src/intelligence/factorize.py - Products of idempotents with verified two-idempotent witnesses
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple, Union

from src.core.chainring import ChainRing, Element
from src.core.mat2 import Mat2, MatrixRing2, Row
from src.core.quaternion import QuatMatIso, Quaternion, QuaternionRing
from src.utils.errors import WitnessVerificationError

logger = logging.getLogger(__name__)

Target = Union[Mat2, Quaternion]


@dataclass(frozen=True)
class Witness:
    """e1 * e2 equals the queried element; both factors idempotent"""
    e1: Target
    e2: Target
    conjugators: Tuple[Mat2, ...] = field(default_factory=tuple)
    r_bound: Optional[int] = None


class IdempotentFactorizer:
    """
    Decide membership in the set of products of idempotents of M_2(R) or H(R)

    Args:
        ring: Coefficient ring
        iso: Optional prebuilt matrix model of H(R); built on first quaternion query
    """

    def __init__(self, ring: ChainRing, iso: Optional[QuatMatIso] = None):
        self.ring = ring
        self.matrices = MatrixRing2(ring)
        self.quaternions = QuaternionRing(ring)
        self._iso = iso

    @cached_property
    def iso(self) -> QuatMatIso:
        return self._iso if self._iso is not None else QuatMatIso.build(self.ring)

    # ---------- verification ----------

    def verify(self, witness: Witness, target: Target) -> Witness:
        """Re-check e1^2 = e1, e2^2 = e2, e1 e2 = target; raise on any failure"""
        if isinstance(target, Quaternion):
            H = self.quaternions
            idem, product = H.q_is_idempotent, H.q_mul
        else:
            M = self.matrices
            idem, product = M.is_idempotent, M.mat_mul

        if not idem(witness.e1):
            raise WitnessVerificationError("e1 is not idempotent", witness)
        if not idem(witness.e2):
            raise WitnessVerificationError("e2 is not idempotent", witness)
        if product(witness.e1, witness.e2) != target:
            raise WitnessVerificationError("e1 * e2 differs from the queried element", witness)
        return witness

    # ---------- matrices ----------

    def find_left_kernel_unimodular(self, A: Mat2) -> Optional[Row]:
        """First unimodular representative w with w A = 0, or None"""
        M = self.matrices
        zero_row = (self.ring.zero, self.ring.zero)
        for w in M.unimodular_representatives():
            if M.row_times(w, A) == zero_row:
                return w
        return None

    def factor_m(self, a: Element, b: Element) -> Witness:
        """
        Two idempotents with product M(a, b)

        Args:
            a: Trace parameter
            b: Upper-right entry

        Returns:
            Verified Witness
        """
        R, M = self.ring, self.matrices
        target = M.m_of(a, b)
        if a == R.zero and b == R.zero:
            return Witness(M.zero(), M.zero())

        v, l = R.unit_part(a)
        u, k = R.unit_part(b)

        if l >= k:
            one_minus_a = R.sub(R.one, a)
            lower = R.mul(R.mul(R.mul(R.inv(u), v), one_minus_a), R.x_pow(l - k))
            e1 = M.m_of(R.one, R.zero)
            e2 = Mat2(a, b, lower, one_minus_a)
            return self.verify(Witness(e1, e2), target)

        # l < k: M(a, b) = S M(a, a) S^-1 with S = diag(1, w) [[1, t], [0, 1]], w = 1
        w = R.one
        t = R.sub(R.one, R.mul(R.mul(R.mul(w, u), R.inv(v)), R.x_pow(k - l)))
        S = M.mat_mul(Mat2(R.one, R.zero, R.zero, w), Mat2(R.one, t, R.zero, R.one))
        inner = self.factor_m(a, a)
        witness = Witness(M.conjugate(S, inner.e1), M.conjugate(S, inner.e2), (S,) + inner.conjugators)
        return self.verify(witness, target)

    def is_product_of_two_idempotents_mat(self, A: Mat2) -> Optional[Witness]:
        """
        Witness (e1, e2) with e1 e2 = A, or None when A is not a product of idempotents

        A is such a product iff A = I or A is conjugate to some M(a, b), i.e. A has a
        unimodular left-kernel row w; w becomes the second row of the conjugator.
        """
        M = self.matrices
        if A == M.identity():
            return Witness(A, A)
        if A != M.zero() and M.is_idempotent(A):
            return self.verify(Witness(A, M.identity()), A)

        w = self.find_left_kernel_unimodular(A)
        if w is None:
            logger.debug("No unimodular left kernel; not a product of idempotents")
            return None

        P = M.complete_unimodular(w)
        B = M.conjugate(P, A)
        inner = self.factor_m(B.e11, B.e12)
        P_inv = M.inverse(P)
        witness = Witness(M.conjugate(P_inv, inner.e1), M.conjugate(P_inv, inner.e2),
                          (P,) + inner.conjugators)
        return self.verify(witness, A)

    # ---------- quaternions ----------

    def is_product_of_idempotents(self, x: Quaternion, r_bound: Optional[int] = None) -> Optional[Witness]:
        """
        Decide whether x is a product of idempotents of H(R)

        Any r-fold product is already a product of two, so r_bound is only recorded.
        When 2 is not invertible H(R) is local and only 0 and 1 qualify.
        """
        H = self.quaternions
        if not self.ring.two_is_invertible:
            if x == H.zero() or x == H.one():
                return Witness(x, x, r_bound=r_bound)
            return None

        matrix_witness = self.is_product_of_two_idempotents_mat(self.iso.to_matrix(x))
        if matrix_witness is None:
            return None
        e1, e2 = self.iso.pull_back((matrix_witness.e1, matrix_witness.e2))
        witness = Witness(e1, e2, matrix_witness.conjugators, r_bound)
        return self.verify(witness, x)

    def factor(self, value: Target, r_bound: Optional[int] = None) -> Optional[Witness]:
        if isinstance(value, Quaternion):
            return self.is_product_of_idempotents(value, r_bound)
        return self.is_product_of_two_idempotents_mat(value)
