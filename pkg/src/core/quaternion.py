# src/core/quaternion.py - Quaternion ring H(R) and its matrix model M_2(R) for odd p
import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

from src.core.chainring import ChainRing, Element
from src.core.mat2 import Mat2, MatrixRing2
from src.utils.errors import NotInvertible, TwoNotInvertible, WitnessVerificationError

logger = logging.getLogger(__name__)

Square4 = Tuple[Tuple[Element, ...], ...]


@dataclass(frozen=True)
class Quaternion:
    """c1 + ci*i + cj*j + ck*k"""
    c1: Element
    ci: Element
    cj: Element
    ck: Element

    def coefficients(self) -> Tuple[Element, Element, Element, Element]:
        return self.c1, self.ci, self.cj, self.ck


class QuaternionRing:
    """H(R) with i^2 = j^2 = k^2 = ijk = -1"""

    def __init__(self, ring: ChainRing):
        self.ring = ring
        R = ring
        self._zero = Quaternion(R.zero, R.zero, R.zero, R.zero)
        self._one = Quaternion(R.one, R.zero, R.zero, R.zero)

    def __repr__(self) -> str:
        return f"QuaternionRing({self.ring.spec.to_string()})"

    def zero(self) -> Quaternion:
        return self._zero

    def one(self) -> Quaternion:
        return self._one

    def make(self, c1, ci, cj, ck) -> Quaternion:
        R = self.ring
        return Quaternion(R.element(c1), R.element(ci), R.element(cj), R.element(ck))

    def basis(self) -> Tuple[Quaternion, Quaternion, Quaternion, Quaternion]:
        R = self.ring
        z, o = R.zero, R.one
        return (self._one, Quaternion(z, o, z, z), Quaternion(z, z, o, z), Quaternion(z, z, z, o))

    # ---------- enumeration ----------

    def size(self) -> int:
        return self.ring.size ** 4

    def index(self, x: Quaternion) -> int:
        s = self.ring.size
        code = 0
        for c in x.coefficients():
            code = code * s + self.ring.index(c)
        return code

    def from_index(self, code: int) -> Quaternion:
        s = self.ring.size
        coeffs = []
        for _ in range(4):
            code, i = divmod(code, s)
            coeffs.append(self.ring.from_index(i))
        return Quaternion(*reversed(coeffs))

    def enumerate(self) -> Iterator[Quaternion]:
        for code in range(self.size()):
            yield self.from_index(code)

    # ---------- arithmetic ----------

    def q_add(self, x: Quaternion, y: Quaternion) -> Quaternion:
        add = self.ring.add
        return Quaternion(add(x.c1, y.c1), add(x.ci, y.ci), add(x.cj, y.cj), add(x.ck, y.ck))

    def q_sub(self, x: Quaternion, y: Quaternion) -> Quaternion:
        sub = self.ring.sub
        return Quaternion(sub(x.c1, y.c1), sub(x.ci, y.ci), sub(x.cj, y.cj), sub(x.ck, y.ck))

    def q_neg(self, x: Quaternion) -> Quaternion:
        neg = self.ring.neg
        return Quaternion(neg(x.c1), neg(x.ci), neg(x.cj), neg(x.ck))

    def q_scale(self, c: Element, x: Quaternion) -> Quaternion:
        mul = self.ring.mul
        return Quaternion(mul(c, x.c1), mul(c, x.ci), mul(c, x.cj), mul(c, x.ck))

    def q_conj(self, x: Quaternion) -> Quaternion:
        neg = self.ring.neg
        return Quaternion(x.c1, neg(x.ci), neg(x.cj), neg(x.ck))

    def q_mul(self, x: Quaternion, y: Quaternion) -> Quaternion:
        """Hamilton product (ij = k, jk = i, ki = j)"""
        R = self.ring
        m, add, sub = R.mul, R.add, R.sub
        a1, b1, c1, d1 = x.coefficients()
        a2, b2, c2, d2 = y.coefficients()
        return Quaternion(
            sub(sub(sub(m(a1, a2), m(b1, b2)), m(c1, c2)), m(d1, d2)),
            sub(add(add(m(a1, b2), m(b1, a2)), m(c1, d2)), m(d1, c2)),
            add(add(sub(m(a1, c2), m(b1, d2)), m(c1, a2)), m(d1, b2)),
            add(sub(add(m(a1, d2), m(b1, c2)), m(c1, b2)), m(d1, a2)),
        )

    def q_norm(self, x: Quaternion) -> Element:
        """x * conj(x) = c1^2 + ci^2 + cj^2 + ck^2"""
        R = self.ring
        total = R.zero
        for c in x.coefficients():
            total = R.add(total, R.mul(c, c))
        return total

    def q_is_unit(self, x: Quaternion) -> bool:
        return self.ring.is_unit(self.q_norm(x))

    def q_is_idempotent(self, x: Quaternion) -> bool:
        return self.q_mul(x, x) == x


def _gauss_jordan_inverse(ring: ChainRing, rows: Square4) -> Square4:
    """Inverse of a square matrix over a local ring; pivots are always chosen among units"""
    R = ring
    size = len(rows)
    work: List[List[Element]] = [
        list(row) + [R.one if i == j else R.zero for j in range(size)] for i, row in enumerate(rows)
    ]

    for col in range(size):
        pivot = next((r for r in range(col, size) if R.is_unit(work[r][col])), None)
        if pivot is None:
            raise NotInvertible(f"no unit pivot in column {col}; determinant is not a unit")
        work[col], work[pivot] = work[pivot], work[col]

        scale = R.inv(work[col][col])
        work[col] = [R.mul(scale, e) for e in work[col]]
        for r in range(size):
            if r != col and work[r][col] != R.zero:
                factor = work[r][col]
                work[r] = [R.sub(e, R.mul(factor, p)) for e, p in zip(work[r], work[col])]

    return tuple(tuple(row[size:]) for row in work)


class QuatMatIso:
    """
    Ring isomorphism H(R) -> M_2(R) for rings with 2 invertible

    1 -> I, i -> [[a, b], [b, -a]], j -> [[0, 1], [-1, 0]], k -> image(i) * image(j),
    where a^2 + b^2 + 1 = 0. The inverse uses the exact inverse of the 4x4 basis matrix.
    """

    def __init__(self, ring: ChainRing, a: Element, b: Element):
        self.ring = ring
        self.a = a
        self.b = b
        self.quaternions = QuaternionRing(ring)
        self.matrices = MatrixRing2(ring)

        R, M = ring, self.matrices
        img_i = Mat2(a, b, b, R.neg(a))
        img_j = Mat2(R.zero, R.one, R.neg(R.one), R.zero)
        self.images: Tuple[Mat2, Mat2, Mat2, Mat2] = (M.identity(), img_i, img_j, M.mat_mul(img_i, img_j))

        # columns are the images flattened row-major
        self.basis_matrix: Square4 = tuple(
            tuple(img.entries()[row] for img in self.images) for row in range(4))
        self.basis_inverse: Square4 = _gauss_jordan_inverse(R, self.basis_matrix)

    @classmethod
    def build(cls, ring: ChainRing) -> 'QuatMatIso':
        """
        Search (a, b) with a^2 + b^2 + 1 = 0 in enumeration order and verify the model

        Raises:
            TwoNotInvertible: 2 lies in J(R); H(R) is local
        """
        if not ring.two_is_invertible:
            raise TwoNotInvertible(f"2 is not invertible in {ring.spec}; H(R) is a local ring")

        R = ring
        elements = list(R.enumerate_elements())
        minus_one = R.neg(R.one)
        squares = [R.mul(e, e) for e in elements]
        for a, a2 in zip(elements, squares):
            target = R.sub(minus_one, a2)
            for b, b2 in zip(elements, squares):
                if b2 == target:
                    iso = cls(R, a, b)
                    iso.check()
                    logger.info("Matrix model for H(%s): a=%s b=%s",
                                R.spec.to_string(), list(a.coeffs), list(b.coeffs))
                    return iso
        raise NotInvertible(f"no solution of a^2 + b^2 + 1 = 0 in {ring.spec}")

    def check(self) -> None:
        """Re-verify the defining relations and the basis inverse"""
        R, M = self.ring, self.matrices
        if R.add(R.add(R.mul(self.a, self.a), R.mul(self.b, self.b)), R.one) != R.zero:
            raise WitnessVerificationError("a^2 + b^2 + 1 != 0")

        one, img_i, img_j, img_k = self.images
        minus_one = M.mat_neg(one)
        for name, img in (('i', img_i), ('j', img_j), ('k', img_k)):
            if M.mat_mul(img, img) != minus_one:
                raise WitnessVerificationError(f"image of {name} does not square to -1")
        if M.mat_mul(M.mat_mul(img_i, img_j), img_k) != minus_one:
            raise WitnessVerificationError("images violate ijk = -1")
        if M.mat_mul(img_i, img_j) != M.mat_neg(M.mat_mul(img_j, img_i)):
            raise WitnessVerificationError("images violate ij = -ji")

        for r in range(4):
            for c in range(4):
                total = R.zero
                for t in range(4):
                    total = R.add(total, R.mul(self.basis_matrix[r][t], self.basis_inverse[t][c]))
                if total != (R.one if r == c else R.zero):
                    raise WitnessVerificationError("basis matrix inverse is wrong")

    def to_matrix(self, x: Quaternion) -> Mat2:
        M = self.matrices
        total = M.zero()
        for coeff, img in zip(x.coefficients(), self.images):
            total = M.mat_add(total, M.mat_scale(coeff, img))
        return total

    def from_matrix(self, A: Mat2) -> Quaternion:
        R = self.ring
        vec = A.entries()
        coeffs = []
        for row in self.basis_inverse:
            total = R.zero
            for coef, entry in zip(row, vec):
                total = R.add(total, R.mul(coef, entry))
            coeffs.append(total)
        return Quaternion(*coeffs)

    def pull_back(self, matrices: Sequence[Mat2]) -> List[Quaternion]:
        return [self.from_matrix(A) for A in matrices]


def build_iso(ring: ChainRing) -> QuatMatIso:
    return QuatMatIso.build(ring)
