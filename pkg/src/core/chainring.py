# src/core/chainring.py - Finite chain rings: Z/p^n, GF(q)[y]/(y^n) and Galois rings GR(p^l, r)
import logging
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import product
from tokenize import TokenError
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from src.config import IdemQuatConfig
from src.utils.errors import CapExceeded, InvalidModulus, NotAUnit, NotPrime, RingSpecError

logger = logging.getLogger(__name__)

_T = sympy.Symbol('t')
_POLY_TRANSFORMS = standard_transformations + (implicit_multiplication_application, convert_xor)
_POLY_CHARS = re.compile(r'^[0-9t+\-*^ ]+$')

Coeffs = Tuple[int, ...]


class RingKind(str, Enum):
    ZPN = 'zpn'
    TRUNC_POLY = 'tp'
    GALOIS = 'gr'


# ========== MODULUS POLYNOMIALS ==========

def parse_modulus(text: str) -> Coeffs:
    """
    Parse a modulus polynomial in t

    Args:
        text: Polynomial such as 't^2+1' or 't^2+2t+2'

    Returns:
        Integer coefficients, lowest degree first
    """
    text = text.strip()
    if not text or not _POLY_CHARS.match(text):
        raise RingSpecError(f"cannot parse modulus polynomial {text!r}")
    try:
        expr = parse_expr(text, local_dict={'t': _T}, transformations=_POLY_TRANSFORMS)
        poly = sympy.Poly(expr, _T)
    except (SyntaxError, TypeError, ValueError, TokenError, sympy.SympifyError, sympy.PolynomialError) as exc:
        raise RingSpecError(f"cannot parse modulus polynomial {text!r}: {exc}") from None

    coeffs = poly.all_coeffs()
    if not all(c.is_integer for c in coeffs):
        raise RingSpecError(f"modulus {text!r} must have integer coefficients")
    return tuple(int(c) for c in reversed(coeffs))


def format_modulus(coeffs: Coeffs) -> str:
    """Render coefficients (lowest degree first) as 't^2+1'"""
    terms = []
    for degree in range(len(coeffs) - 1, -1, -1):
        c = coeffs[degree]
        if c == 0:
            continue
        mono = '' if degree == 0 else ('t' if degree == 1 else f't^{degree}')
        if not mono:
            terms.append(str(c))
        elif c == 1:
            terms.append(mono)
        else:
            terms.append(f'{c}*{mono}')
    return '+'.join(terms) if terms else '0'


def _poly_mulmod(a: Coeffs, b: Coeffs, f: Coeffs, m: int) -> Coeffs:
    """Product a*b reduced modulo the monic polynomial f and the integer m"""
    r = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj

    # t^r = -(f_0 + f_1 t + ... + f_{r-1} t^{r-1})
    for d in range(len(prod) - 1, r - 1, -1):
        c = prod[d] % m
        if c:
            for i in range(r):
                prod[d - r + i] -= c * f[i]
        prod[d] = 0

    out = [c % m for c in prod[:r]]
    out.extend([0] * (r - len(out)))
    return tuple(out)


# ========== RING SPEC ==========

@dataclass(frozen=True)
class RingSpec:
    """Parameters of one of the three supported chain-ring constructions"""
    kind: RingKind
    p: int
    n: int                      # chain length; equals l for Galois rings
    r: int = 1
    modulus: Coeffs = ()        # monic, lowest degree first; empty for ZPN

    # ---------- constructors ----------

    @classmethod
    def zpn(cls, p: int, n: int) -> 'RingSpec':
        return cls(RingKind.ZPN, p, n)

    @classmethod
    def trunc_poly(cls, p: int, r: int, n: int, f: Union[str, Sequence[int], None] = None) -> 'RingSpec':
        if f is None:
            if r != 1:
                raise RingSpecError("tp rings with r > 1 need a modulus f")
            f = (0, 1)
        coeffs = parse_modulus(f) if isinstance(f, str) else tuple(int(c) for c in f)
        if p >= 2:
            coeffs = tuple(c % p for c in coeffs)
        return cls(RingKind.TRUNC_POLY, p, n, r, coeffs)

    @classmethod
    def galois(cls, p: int, l: int, r: int, f: Union[str, Sequence[int]]) -> 'RingSpec':
        coeffs = parse_modulus(f) if isinstance(f, str) else tuple(int(c) for c in f)
        if p >= 2 and l >= 1:
            coeffs = tuple(c % p ** l for c in coeffs)
        return cls(RingKind.GALOIS, p, l, r, coeffs)

    @property
    def l(self) -> int:
        return self.n

    # ---------- spec string grammar ----------

    @classmethod
    def parse(cls, text: str) -> 'RingSpec':
        """
        Parse 'zpn:p=3,n=2', 'tp:p=3,r=2,n=1,f=t^2+1' or 'gr:p=3,l=2,r=2,f=t^2+1'

        Args:
            text: Ring spec string

        Returns:
            RingSpec (syntax only; call validate() for the algebraic checks)
        """
        kind_text, sep, params = text.strip().partition(':')
        if not sep:
            raise RingSpecError(f"ring spec {text!r} is missing 'kind:'")
        try:
            kind = RingKind(kind_text.strip().lower())
        except ValueError:
            raise RingSpecError(f"unknown ring kind {kind_text!r} (expected zpn, tp or gr)") from None

        fields: Dict[str, str] = {}
        for part in params.split(','):
            key, eq, value = part.partition('=')
            key = key.strip()
            if not eq or not key or key in fields:
                raise RingSpecError(f"bad parameter {part!r} in ring spec {text!r}")
            fields[key] = value.strip()

        allowed = {
            RingKind.ZPN: ({'p', 'n'}, set()),
            RingKind.TRUNC_POLY: ({'p', 'r', 'n'}, {'f'}),
            RingKind.GALOIS: ({'p', 'l', 'r', 'f'}, set()),
        }[kind]
        required, optional = allowed
        missing = required - fields.keys()
        unknown = fields.keys() - required - optional
        if missing or unknown:
            raise RingSpecError(
                f"ring spec {text!r}: missing {sorted(missing)} unknown {sorted(unknown)}")

        ints = {}
        for key in fields.keys() - {'f'}:
            try:
                ints[key] = int(fields[key])
            except ValueError:
                raise RingSpecError(f"parameter {key}={fields[key]!r} is not an integer") from None

        if kind is RingKind.ZPN:
            return cls.zpn(ints['p'], ints['n'])
        if kind is RingKind.TRUNC_POLY:
            return cls.trunc_poly(ints['p'], ints['r'], ints['n'], fields.get('f'))
        return cls.galois(ints['p'], ints['l'], ints['r'], fields['f'])

    def to_string(self) -> str:
        if self.kind is RingKind.ZPN:
            return f"zpn:p={self.p},n={self.n}"
        if self.kind is RingKind.TRUNC_POLY:
            return f"tp:p={self.p},r={self.r},n={self.n},f={format_modulus(self.modulus)}"
        return f"gr:p={self.p},l={self.l},r={self.r},f={format_modulus(self.modulus)}"

    def __str__(self) -> str:
        return self.to_string()

    # ---------- validation ----------

    def validate(self) -> None:
        """Raise NotPrime / InvalidModulus / RingSpecError on invalid parameters"""
        if not sympy.isprime(self.p):
            raise NotPrime(f"p={self.p} is not prime")
        if self.n < 1 or self.r < 1:
            raise RingSpecError(f"exponents must be >= 1 (n={self.n}, r={self.r})")
        if self.kind is RingKind.ZPN:
            return

        f = self.modulus
        if len(f) != self.r + 1:
            raise InvalidModulus(
                f"modulus {format_modulus(f)} has degree {len(f) - 1}, expected r={self.r}")
        if f[-1] != 1:
            raise InvalidModulus(f"modulus {format_modulus(f)} is not monic")

        reduced = sympy.Poly(list(reversed(f)), _T, modulus=self.p)
        if not reduced.is_irreducible:
            raise InvalidModulus(f"modulus {format_modulus(f)} is reducible modulo {self.p}")


# ========== ELEMENTS ==========

@dataclass(frozen=True)
class Element:
    """
    Canonical coefficient vector of a ring element

    ZPN: (residue,); TRUNC_POLY: n coefficients of y^i, each a GF(q) code in [0, q)
    whose base-p digits are the t-coefficients; GALOIS: r coefficients of t^i in [0, p^l).
    """
    coeffs: Coeffs


# ========== PER-KIND ARITHMETIC ==========

class _ResidueArithmetic:
    """Z/p^n"""

    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.m = p ** n
        self.radix = self.m
        self.ncoeffs = 1

    def add(self, a: Coeffs, b: Coeffs) -> Coeffs:
        return ((a[0] + b[0]) % self.m,)

    def neg(self, a: Coeffs) -> Coeffs:
        return ((-a[0]) % self.m,)

    def mul(self, a: Coeffs, b: Coeffs) -> Coeffs:
        return ((a[0] * b[0]) % self.m,)

    def valuation(self, a: Coeffs) -> int:
        v, value = 0, a[0]
        if value == 0:
            return self.n
        while value % self.p == 0:
            value //= self.p
            v += 1
        return v

    def residue(self, a: Coeffs) -> Coeffs:
        return (a[0] % self.p,)

    def shift_down(self, a: Coeffs) -> Coeffs:
        return (a[0] // self.p,)

    def one(self) -> Coeffs:
        return (1 % self.m,)

    def uniformizer(self) -> Coeffs:
        return (self.p % self.m,)

    def transversal(self) -> List[Coeffs]:
        return [(c,) for c in range(self.p)]


class _TruncatedArithmetic:
    """GF(q)[y]/(y^n) with GF(q) = F_p[t]/(f)"""

    def __init__(self, p: int, r: int, n: int, f: Coeffs):
        self.p, self.r, self.n = p, r, n
        self.q = p ** r
        self.radix = self.q
        self.ncoeffs = n

        digits = [self._digits(c) for c in range(self.q)]
        self._gf_add = [[self._code(tuple((x + y) % p for x, y in zip(da, db))) for db in digits]
                        for da in digits]
        self._gf_neg = [self._code(tuple((-x) % p for x in da)) for da in digits]
        self._gf_mul = [[self._code(_poly_mulmod(da, db, f, p)) for db in digits] for da in digits]

    def _digits(self, code: int) -> Coeffs:
        out = []
        for _ in range(self.r):
            code, d = divmod(code, self.p)
            out.append(d)
        return tuple(out)

    def _code(self, digits: Coeffs) -> int:
        value = 0
        for d in reversed(digits):
            value = value * self.p + d
        return value

    def add(self, a: Coeffs, b: Coeffs) -> Coeffs:
        return tuple(self._gf_add[x][y] for x, y in zip(a, b))

    def neg(self, a: Coeffs) -> Coeffs:
        return tuple(self._gf_neg[x] for x in a)

    def mul(self, a: Coeffs, b: Coeffs) -> Coeffs:
        out = [0] * self.n
        for i, ai in enumerate(a):
            if ai:
                row = self._gf_mul[ai]
                for j in range(self.n - i):
                    bj = b[j]
                    if bj:
                        out[i + j] = self._gf_add[out[i + j]][row[bj]]
        return tuple(out)

    def valuation(self, a: Coeffs) -> int:
        for i, c in enumerate(a):
            if c:
                return i
        return self.n

    def residue(self, a: Coeffs) -> Coeffs:
        return (a[0],) + (0,) * (self.n - 1)

    def shift_down(self, a: Coeffs) -> Coeffs:
        return a[1:] + (0,)

    def one(self) -> Coeffs:
        return (1,) + (0,) * (self.n - 1)

    def uniformizer(self) -> Coeffs:
        if self.n == 1:
            return (0,)
        return (0, 1) + (0,) * (self.n - 2)

    def transversal(self) -> List[Coeffs]:
        return [(c,) + (0,) * (self.n - 1) for c in range(self.q)]


class _GaloisArithmetic:
    """GR(p^l, r) = (Z/p^l)[t]/(f)"""

    def __init__(self, p: int, l: int, r: int, f: Coeffs):
        self.p, self.l, self.r = p, l, r
        self.m = p ** l
        self.f = f
        self.radix = self.m
        self.ncoeffs = r

    def add(self, a: Coeffs, b: Coeffs) -> Coeffs:
        return tuple((x + y) % self.m for x, y in zip(a, b))

    def neg(self, a: Coeffs) -> Coeffs:
        return tuple((-x) % self.m for x in a)

    def mul(self, a: Coeffs, b: Coeffs) -> Coeffs:
        return _poly_mulmod(a, b, self.f, self.m)

    def valuation(self, a: Coeffs) -> int:
        best = self.l
        for c in a:
            if c:
                v = 0
                while c % self.p == 0:
                    c //= self.p
                    v += 1
                best = min(best, v)
        return best

    def residue(self, a: Coeffs) -> Coeffs:
        return tuple(c % self.p for c in a)

    def shift_down(self, a: Coeffs) -> Coeffs:
        return tuple(c // self.p for c in a)

    def one(self) -> Coeffs:
        return (1 % self.m,) + (0,) * (self.r - 1)

    def uniformizer(self) -> Coeffs:
        return (self.p % self.m,) + (0,) * (self.r - 1)

    def transversal(self) -> List[Coeffs]:
        return [tuple(reversed(digits)) for digits in product(range(self.p), repeat=self.r)]


def _make_arithmetic(spec: RingSpec):
    if spec.kind is RingKind.ZPN:
        return _ResidueArithmetic(spec.p, spec.n)
    if spec.kind is RingKind.TRUNC_POLY:
        return _TruncatedArithmetic(spec.p, spec.r, spec.n, spec.modulus)
    return _GaloisArithmetic(spec.p, spec.l, spec.r, spec.modulus)


# ========== THE RING HANDLE ==========

class ChainRing:
    """
    A fully materialized finite chain ring R with |R| = q^n, R/J(R) = GF(q), J(R) = (x)

    Elements are enumerated in index order: index(a) = sum(c_i * radix^i) over the
    coefficient vector, so the first coefficient is the least significant digit.
    """

    def __init__(self, spec: RingSpec):
        spec.validate()
        self.spec = spec
        self.kind = spec.kind
        self.p = spec.p
        self.r = spec.r
        self.n = spec.n
        self.q = self.p ** self.r

        self._arith = _make_arithmetic(spec)
        self._radix = self._arith.radix
        self._ncoeffs = self._arith.ncoeffs
        self.size = self._radix ** self._ncoeffs

        self.zero = Element((0,) * self._ncoeffs)
        self.one = Element(self._arith.one())
        self.x = Element(self._arith.uniformizer())
        self.transversal: Tuple[Element, ...] = tuple(
            sorted((Element(c) for c in self._arith.transversal()), key=self.index))

        self._x_powers = [self.one]
        for _ in range(self.n):
            self._x_powers.append(self.mul(self._x_powers[-1], self.x))
        self._ideal_cache: Dict[int, Tuple[Element, ...]] = {}

        self._check_structure()
        logger.info("Built %s: q=%d n=%d size=%d", spec.to_string(), self.q, self.n, self.size)

    @classmethod
    def from_string(cls, text: str) -> 'ChainRing':
        return cls(RingSpec.parse(text))

    def _check_structure(self):
        """Verify size, uniformizer nilpotency index and transversal"""
        if self.size != self.q ** self.n:
            raise RingSpecError(f"size {self.size} != q^n = {self.q ** self.n}")
        if self._x_powers[self.n] != self.zero or self._x_powers[self.n - 1] == self.zero:
            raise RingSpecError(f"uniformizer does not have nilpotency index {self.n}")

        t = self.transversal
        if len(t) != self.q or self.zero not in t:
            raise RingSpecError("transversal must have q elements including 0")
        residues = {self._arith.residue(e.coeffs) for e in t}
        if len(residues) != self.q:
            raise RingSpecError("transversal elements are not distinct modulo J(R)")

    # ---------- identity ----------

    def __eq__(self, other) -> bool:
        return isinstance(other, ChainRing) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    def __repr__(self) -> str:
        return f"ChainRing({self.spec.to_string()})"

    # ---------- elements & enumeration ----------

    def element(self, value: Union[int, Sequence[int], Element]) -> Element:
        """
        Build an element from a residue (ZPN) or a coefficient list

        Args:
            value: int for Z/p^n, sequence of ints otherwise, or an Element

        Returns:
            Element in canonical form
        """
        if isinstance(value, Element):
            coeffs = value.coeffs
        elif isinstance(value, (int, np.integer)):
            if self._ncoeffs != 1 and value not in (0, 1):
                raise RingSpecError(f"{self.spec} elements need a coefficient list")
            coeffs = (int(value),) if self._ncoeffs == 1 else (self.one.coeffs if value else self.zero.coeffs)
        else:
            coeffs = tuple(int(c) for c in value)

        if len(coeffs) != self._ncoeffs or not all(0 <= c < self._radix for c in coeffs):
            raise RingSpecError(f"{list(coeffs)} is not a canonical element of {self.spec}")
        return Element(coeffs)

    def index(self, a: Element) -> int:
        value = 0
        for c in reversed(a.coeffs):
            value = value * self._radix + c
        return value

    def from_index(self, i: int) -> Element:
        coeffs = []
        for _ in range(self._ncoeffs):
            i, c = divmod(i, self._radix)
            coeffs.append(c)
        return Element(tuple(coeffs))

    def enumerate_elements(self) -> Iterator[Element]:
        for i in range(self.size):
            yield self.from_index(i)

    def enumerate_units(self) -> Iterator[Element]:
        return (a for a in self.enumerate_elements() if self.is_unit(a))

    def enumerate_ideal(self, k: int) -> Tuple[Element, ...]:
        """Elements of J(R)^k = (x^k), in enumeration order"""
        if not 0 <= k <= self.n:
            raise RingSpecError(f"ideal exponent {k} outside [0, {self.n}]")
        if k not in self._ideal_cache:
            self._ideal_cache[k] = tuple(a for a in self.enumerate_elements() if self.valuation(a) >= k)
        return self._ideal_cache[k]

    def residue_field_size(self) -> int:
        return self.q

    def unit_count(self) -> int:
        return self.q ** (self.n - 1) * (self.q - 1)

    def ideal_size(self, k: int) -> int:
        return self.q ** (self.n - k)

    @property
    def two_is_invertible(self) -> bool:
        return self.p != 2

    # ---------- arithmetic ----------

    def add(self, a: Element, b: Element) -> Element:
        return Element(self._arith.add(a.coeffs, b.coeffs))

    def neg(self, a: Element) -> Element:
        return Element(self._arith.neg(a.coeffs))

    def sub(self, a: Element, b: Element) -> Element:
        return Element(self._arith.add(a.coeffs, self._arith.neg(b.coeffs)))

    def mul(self, a: Element, b: Element) -> Element:
        return Element(self._arith.mul(a.coeffs, b.coeffs))

    def pow(self, a: Element, e: int) -> Element:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def x_pow(self, k: int) -> Element:
        return self._x_powers[k] if k <= self.n else self.zero

    def is_unit(self, a: Element) -> bool:
        return self._arith.valuation(a.coeffs) == 0

    def inv(self, u: Element) -> Element:
        if not self.is_unit(u):
            raise NotAUnit(f"{list(u.coeffs)} lies in J(R) of {self.spec}")
        if self.kind is RingKind.ZPN:
            return Element((pow(u.coeffs[0], -1, self.size),))
        # U(R) has order q^(n-1)(q-1)
        return self.pow(u, self.unit_count() - 1)

    # ---------- valuation & digits ----------

    def valuation(self, a: Element) -> int:
        """Largest k with a in (x^k); v(0) = n"""
        return self._arith.valuation(a.coeffs)

    def unit_part(self, a: Element) -> Tuple[Element, int]:
        """
        Decompose a = u * x^v with u a unit

        Returns:
            (u, v) with u the smallest valid unit in enumeration order; (1, n) for a = 0
        """
        if a == self.zero:
            return self.one, self.n
        v = self.valuation(a)
        coeffs = a.coeffs
        for _ in range(v):
            coeffs = self._arith.shift_down(coeffs)
        c = Element(coeffs)
        # every u with u x^v = a lies in c + ann(x^v) = c + J^(n-v)
        u = min((self.add(c, j) for j in self.enumerate_ideal(self.n - v)), key=self.index)
        return u, v

    def residue_representative(self, a: Element) -> Element:
        """The transversal element congruent to a modulo J(R)"""
        return Element(self._arith.residue(a.coeffs))

    def digit_expansion(self, a: Element) -> List[Element]:
        """Digits d_0..d_{n-1} in the transversal with a = sum d_i x^i"""
        digits = []
        current = a
        for _ in range(self.n):
            d = self.residue_representative(current)
            digits.append(d)
            current = Element(self._arith.shift_down(self.sub(current, d).coeffs))
        return digits

    def recompose(self, digits: Sequence[Element]) -> Element:
        total = self.zero
        for i, d in enumerate(digits):
            total = self.add(total, self.mul(d, self.x_pow(i)))
        return total

    # ---------- tables ----------

    @cached_property
    def tables(self) -> 'RingTables':
        return RingTables(self)

    def describe(self) -> Dict[str, object]:
        return {
            'spec': self.spec.to_string(),
            'kind': self.kind.value,
            'p': self.p,
            'r': self.r,
            'n': self.n,
            'q': self.q,
            'size': self.size,
            'units': self.unit_count(),
            'ideal_sizes': {k: self.ideal_size(k) for k in range(self.n + 1)},
            'two_invertible': self.two_is_invertible,
        }


class RingTables:
    """Operation tables indexed by canonical element index, for vectorized sweeps"""

    def __init__(self, ring: ChainRing):
        s = ring.size
        if s > IdemQuatConfig.TABLE_SIZE_LIMIT:
            raise CapExceeded('operation table', s, IdemQuatConfig.TABLE_SIZE_LIMIT)

        self.size = s
        if ring.kind is RingKind.ZPN:
            idx = np.arange(s, dtype=np.int64)
            add = (idx[:, None] + idx[None, :]) % s
            mul = (idx[:, None] * idx[None, :]) % s
            neg = (-idx) % s
        else:
            elements = list(ring.enumerate_elements())
            add = np.empty((s, s), dtype=np.int64)
            mul = np.empty((s, s), dtype=np.int64)
            for i, a in enumerate(elements):
                for j in range(i, s):
                    b = elements[j]
                    add[i, j] = add[j, i] = ring.index(ring.add(a, b))
                    mul[i, j] = mul[j, i] = ring.index(ring.mul(a, b))
            neg = np.array([ring.index(ring.neg(a)) for a in elements], dtype=np.int64)

        self.add_flat = add.astype(np.int32).ravel()
        self.mul_flat = mul.astype(np.int32).ravel()
        self.neg = neg.astype(np.int32)
        self.valuation = np.array([ring.valuation(ring.from_index(i)) for i in range(s)], dtype=np.int32)
        self.unit = self.valuation == 0
        if ring.n >= 1:
            self.unit[0] = False
        self.zero = 0
        self.one = ring.index(ring.one)
        logger.debug("Tables for %s: %d x %d", ring.spec.to_string(), s, s)

    def add(self, x, y):
        return self.add_flat[x * self.size + y]

    def mul(self, x, y):
        return self.mul_flat[x * self.size + y]

    def sub(self, x, y):
        return self.add_flat[x * self.size + self.neg[y]]


def ring_make(spec: Union[RingSpec, str]) -> ChainRing:
    """Materialize a ring from a RingSpec or a spec string"""
    if isinstance(spec, str):
        spec = RingSpec.parse(spec)
    return ChainRing(spec)


def ring_from_string(text: str) -> ChainRing:
    return ChainRing.from_string(text)
