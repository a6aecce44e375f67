# src/core/mat2.py - 2x2 matrices over a chain ring: idempotents, M(a,b) forms and conjugacy orbits
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Set, Tuple

from src.core.chainring import ChainRing, Element
from src.utils.errors import (
    NonIntegralStabilizer,
    NotIdempotent,
    NotInvertible,
    NotUnimodular,
    TrivialIdempotent,
)

logger = logging.getLogger(__name__)

Row = Tuple[Element, Element]


@dataclass(frozen=True)
class Mat2:
    """[[e11, e12], [e21, e22]]"""
    e11: Element
    e12: Element
    e21: Element
    e22: Element

    def entries(self) -> Tuple[Element, Element, Element, Element]:
        return self.e11, self.e12, self.e21, self.e22


@dataclass(frozen=True)
class OrbitLabel:
    """
    Canonical name of the conjugacy orbit of M(a, b)

    k is None for the ZERO class (orbit of M(a, 0)); otherwise POWER(k),
    the orbit of M(a, x^k) with k < v(a).
    """
    a: Element
    k: Optional[int] = None

    @property
    def is_zero_class(self) -> bool:
        return self.k is None

    @property
    def bclass(self) -> str:
        return 'ZERO' if self.k is None else f'POWER({self.k})'


class OrbitVariant(str, Enum):
    STATEMENT = 'STATEMENT'
    PROOF = 'PROOF'


# ========== PURE COUNTING ==========

def gl2_size_formula(q: int, n: int) -> int:
    """|GL_2(R)| = q^(4n-3)(q-1)(q^2-1)"""
    return q ** (4 * n - 3) * (q - 1) * (q * q - 1)


def orbit_size_formula(q: int, n: int, l: int, k: Optional[int], variant: OrbitVariant) -> int:
    """
    Orbit size of M(a, b) from the case analysis on l = v(a) and the b-class

    Args:
        q: Residue field size
        n: Chain length
        l: Valuation of the trace parameter a (l = n means a = 0)
        k: None for the ZERO class, else the b-valuation with k < l
        variant: Which k < l < n formula to use

    Returns:
        Exact orbit size
    """
    if k is not None and not 0 <= k < l:
        raise ValueError(f"POWER({k}) needs 0 <= k < l={l}")
    if l >= n:
        if k is None:
            return 1
        return q ** (2 * (n - k - 1)) * (q * q - 1)
    if k is None:
        return q ** (2 * n - 2 * l - 1) * (q + 1)
    if OrbitVariant(variant) is OrbitVariant.STATEMENT:
        return q ** (2 * n - k - l - 1) * (q * q - 1)
    return q ** (2 * (n - k - 1)) * (q * q - 1)


class MatrixRing2:
    """
    M_2(R) for a chain ring R

    Args:
        ring: The coefficient ring
    """

    def __init__(self, ring: ChainRing):
        self.ring = ring
        R = ring
        self._zero = Mat2(R.zero, R.zero, R.zero, R.zero)
        self._one = Mat2(R.one, R.zero, R.zero, R.one)
        self._row_reps: Optional[List[Row]] = None

    def __repr__(self) -> str:
        return f"MatrixRing2({self.ring.spec.to_string()})"

    # ---------- constructors ----------

    def identity(self) -> Mat2:
        return self._one

    def zero(self) -> Mat2:
        return self._zero

    def scalar(self, c: Element) -> Mat2:
        z = self.ring.zero
        return Mat2(c, z, z, c)

    def m_of(self, a: Element, b: Element) -> Mat2:
        """M(a, b) = [[a, b], [0, 0]]"""
        z = self.ring.zero
        return Mat2(a, b, z, z)

    def from_rows(self, rows) -> Mat2:
        (a, b), (c, d) = rows
        R = self.ring
        return Mat2(R.element(a), R.element(b), R.element(c), R.element(d))

    # ---------- enumeration & codes ----------

    def index(self, A: Mat2) -> int:
        s = self.ring.size
        code = 0
        for e in A.entries():
            code = code * s + self.ring.index(e)
        return code

    def from_index(self, code: int) -> Mat2:
        s = self.ring.size
        entries = []
        for _ in range(4):
            code, i = divmod(code, s)
            entries.append(self.ring.from_index(i))
        return Mat2(*reversed(entries))

    def size(self) -> int:
        return self.ring.size ** 4

    def enumerate(self) -> Iterator[Mat2]:
        for code in range(self.size()):
            yield self.from_index(code)

    # ---------- arithmetic ----------

    def mat_add(self, A: Mat2, B: Mat2) -> Mat2:
        add = self.ring.add
        return Mat2(add(A.e11, B.e11), add(A.e12, B.e12), add(A.e21, B.e21), add(A.e22, B.e22))

    def mat_neg(self, A: Mat2) -> Mat2:
        neg = self.ring.neg
        return Mat2(neg(A.e11), neg(A.e12), neg(A.e21), neg(A.e22))

    def mat_scale(self, c: Element, A: Mat2) -> Mat2:
        mul = self.ring.mul
        return Mat2(mul(c, A.e11), mul(c, A.e12), mul(c, A.e21), mul(c, A.e22))

    def mat_mul(self, A: Mat2, B: Mat2) -> Mat2:
        R = self.ring
        add, mul = R.add, R.mul
        return Mat2(
            add(mul(A.e11, B.e11), mul(A.e12, B.e21)),
            add(mul(A.e11, B.e12), mul(A.e12, B.e22)),
            add(mul(A.e21, B.e11), mul(A.e22, B.e21)),
            add(mul(A.e21, B.e12), mul(A.e22, B.e22)),
        )

    def det(self, A: Mat2) -> Element:
        R = self.ring
        return R.sub(R.mul(A.e11, A.e22), R.mul(A.e12, A.e21))

    def trace(self, A: Mat2) -> Element:
        return self.ring.add(A.e11, A.e22)

    def is_idempotent(self, A: Mat2) -> bool:
        return self.mat_mul(A, A) == A

    def is_invertible(self, A: Mat2) -> bool:
        return self.ring.is_unit(self.det(A))

    def inverse(self, P: Mat2) -> Mat2:
        R = self.ring
        d = self.det(P)
        if not R.is_unit(d):
            raise NotInvertible(f"determinant {list(d.coeffs)} is not a unit")
        d_inv = R.inv(d)
        adj = Mat2(P.e22, R.neg(P.e12), R.neg(P.e21), P.e11)
        return self.mat_scale(d_inv, adj)

    def conjugate(self, P: Mat2, A: Mat2) -> Mat2:
        """P A P^-1"""
        return self.mat_mul(self.mat_mul(P, A), self.inverse(P))

    def row_times(self, w: Row, A: Mat2) -> Row:
        """Row vector w times A"""
        R = self.ring
        return (R.add(R.mul(w[0], A.e11), R.mul(w[1], A.e21)),
                R.add(R.mul(w[0], A.e12), R.mul(w[1], A.e22)))

    def times_column(self, A: Mat2, v: Row) -> Row:
        """A times the column vector v"""
        R = self.ring
        return (R.add(R.mul(A.e11, v[0]), R.mul(A.e12, v[1])),
                R.add(R.mul(A.e21, v[0]), R.mul(A.e22, v[1])))

    # ---------- unimodular rows ----------

    def unimodular_representatives(self) -> List[Row]:
        """(1, s) for s in R, then (s, 1) for s in J(R); one per unit-multiple class"""
        if self._row_reps is None:
            R = self.ring
            reps = [(R.one, s) for s in R.enumerate_elements()]
            reps.extend((s, R.one) for s in R.enumerate_ideal(1))
            self._row_reps = reps
        return self._row_reps

    def complete_unimodular(self, w: Row) -> Mat2:
        """Invertible P whose second row is w"""
        R = self.ring
        w1, w2 = w
        if R.is_unit(w2):
            return Mat2(R.one, R.zero, w1, w2)
        if R.is_unit(w1):
            return Mat2(R.zero, R.one, w1, w2)
        raise NotUnimodular(f"row ({list(w1.coeffs)}, {list(w2.coeffs)}) has no unit coordinate")

    # ---------- idempotents ----------

    def diagonalize_idempotent(self, A: Mat2) -> Mat2:
        """
        Find P with P A P^-1 = M(1, 0) for a nontrivial idempotent A

        The columns of P^-1 are a unimodular fixed vector v (Av = v) and a
        unimodular kernel vector w (Aw = 0).
        """
        if not self.is_idempotent(A):
            raise NotIdempotent("matrix does not square to itself")
        if A == self._zero or A == self._one:
            raise TrivialIdempotent("0 and I are not conjugate to M(1, 0)")

        reps = self.unimodular_representatives()
        zero_col = (self.ring.zero, self.ring.zero)
        v = next((c for c in reps if self.times_column(A, c) == c), None)
        w = next((c for c in reps if self.times_column(A, c) == zero_col), None)
        if v is None or w is None:
            raise NotIdempotent("idempotent without unimodular image and kernel vectors")

        Q = Mat2(v[0], w[0], v[1], w[1])
        P = self.inverse(Q)
        if self.conjugate(P, A) != self.m_of(self.ring.one, self.ring.zero):
            raise NotIdempotent("diagonalization did not reach M(1, 0)")
        return P

    # ---------- M(a, b) orbits ----------

    def combination_set(self, a: Element, b: Element) -> Set[Element]:
        """{t*a + w*b : t in R, w in U(R)}"""
        R = self.ring
        units = list(R.enumerate_units())
        return {R.add(R.mul(t, a), R.mul(w, b)) for t in R.enumerate_elements() for w in units}

    def same_orbit_m(self, a: Element, b: Element, a2: Element, b2: Element) -> bool:
        """Whether M(a, b) and M(a2, b2) are conjugate"""
        if a != a2:
            return False
        R = self.ring
        l, k, k2 = R.valuation(a), R.valuation(b), R.valuation(b2)
        return (k >= l and k2 >= l) or (k == k2 < l)

    def same_orbit_m_by_search(self, a: Element, b: Element, a2: Element, b2: Element) -> bool:
        """Search form: a = a2 and b2 - u*b lies in (a) for some unit u"""
        if a != a2:
            return False
        R = self.ring
        l = R.valuation(a)
        return any(R.valuation(R.sub(b2, R.mul(u, b))) >= l for u in R.enumerate_units())

    def canonical_rep(self, a: Element, b: Element) -> OrbitLabel:
        R = self.ring
        l, k = R.valuation(a), R.valuation(b)
        return OrbitLabel(a) if k >= l else OrbitLabel(a, k)

    def label_matrix(self, label: OrbitLabel) -> Mat2:
        """M(a, 0) for ZERO, M(a, x^k) for POWER(k)"""
        R = self.ring
        b = R.zero if label.k is None else R.x_pow(label.k)
        return self.m_of(label.a, b)

    def labels(self) -> Iterator[OrbitLabel]:
        """Every orbit label of the ring, by a in enumeration order then ZERO, POWER(0), ..."""
        R = self.ring
        for a in R.enumerate_elements():
            yield OrbitLabel(a)
            for k in range(R.valuation(a)):
                yield OrbitLabel(a, k)

    def gl2_size(self) -> int:
        return gl2_size_formula(self.ring.q, self.ring.n)

    def orbit_size(self, label: OrbitLabel, variant: OrbitVariant = OrbitVariant.PROOF) -> int:
        R = self.ring
        return orbit_size_formula(R.q, R.n, R.valuation(label.a), label.k, variant)

    def stabilizer_size(self, label: OrbitLabel, variant: OrbitVariant = OrbitVariant.PROOF) -> int:
        gl2 = self.gl2_size()
        orbit = self.orbit_size(label, variant)
        stab, rem = divmod(gl2, orbit)
        if rem:
            raise NonIntegralStabilizer(
                f"|GL_2| = {gl2} is not divisible by orbit size {orbit} ({variant})")
        return stab
