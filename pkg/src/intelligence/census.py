# src/intelligence/census.py - Counting formulas, exhaustive oracles and verdict reports
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.config import CensusConfig
from src.core.chainring import ChainRing, RingTables
from src.core.mat2 import (
    Mat2,
    MatrixRing2,
    OrbitLabel,
    OrbitVariant,
    gl2_size_formula,
    orbit_size_formula,
)
from src.utils.errors import CapExceeded, NonIntegralFormula
from src.utils.literals import format_element

logger = logging.getLogger(__name__)


class CarrierTarget(str, Enum):
    H = 'h'
    M2 = 'm2'


class IdempotentVariant(str, Enum):
    PAPER = 'PAPER'
    ALT = 'ALT'


class ProductVariant(str, Enum):
    CLOSED = 'CLOSED'
    ORBITSUM_STATEMENT = 'ORBITSUM_STATEMENT'
    ORBITSUM_PROOF = 'ORBITSUM_PROOF'


# ========== FORMULAS ==========

def count_idempotents_formula(q: int, n: int, p: Optional[int], variant: IdempotentVariant) -> int:
    """
    Number of idempotents of H(R) (p given) or M_2(R) (p=None)

    PAPER: 2 + q^(3n-2)(q^2-1); ALT: 2 + q^(2n-1)(q+1). H(R) with p = 2 is local: 2.
    """
    if p == 2:
        return 2
    if IdempotentVariant(variant) is IdempotentVariant.PAPER:
        return 2 + q ** (3 * n - 2) * (q * q - 1)
    return 2 + q ** (2 * n - 1) * (q + 1)


def _orbit_sum(q: int, n: int, variant: OrbitVariant) -> int:
    """1 (for I) plus the sizes of every M(a, b) orbit, grouped by l = v(a)"""
    total = 1
    for l in range(n + 1):
        multiplicity = 1 if l == n else q ** (n - l - 1) * (q - 1)
        per_a = orbit_size_formula(q, n, l, None, variant)
        per_a += sum(orbit_size_formula(q, n, l, k, variant) for k in range(l))
        total += multiplicity * per_a
    return total


def count_products_formula(q: int, n: int, variant: ProductVariant, p: Optional[int] = None) -> int:
    """
    Number of products of idempotents

    CLOSED: q^(2n) - q^(n+1) + ((q+2) q^(3n+1) + q^3 + q^2 + 1) / (q^2 + q + 1)
    ORBITSUM_*: 1 + sum of orbit sizes over all orbit labels, per orbit-size variant
    """
    if p == 2:
        return 2
    variant = ProductVariant(variant)
    if variant is ProductVariant.CLOSED:
        numerator = (q + 2) * q ** (3 * n + 1) + q ** 3 + q ** 2 + 1
        quotient, rem = divmod(numerator, q * q + q + 1)
        if rem:
            raise NonIntegralFormula(f"closed form numerator {numerator} not divisible by q^2+q+1 (q={q})")
        return q ** (2 * n) - q ** (n + 1) + quotient
    if variant is ProductVariant.ORBITSUM_STATEMENT:
        return _orbit_sum(q, n, OrbitVariant.STATEMENT)
    return _orbit_sum(q, n, OrbitVariant.PROOF)


def example_formula_alpha(n: int) -> int:
    """(15 a^3 + 13 a^2 - 39 a + 37) / 13 with a = 3^n"""
    if n < 1:
        raise ValueError("n must be >= 1")
    alpha = 3 ** n
    quotient, rem = divmod(15 * alpha ** 3 + 13 * alpha ** 2 - 39 * alpha + 37, 13)
    if rem:
        raise NonIntegralFormula(f"alpha formula not integral at n={n}")
    return quotient


def formula_table(q: int, n: int, p: Optional[int] = None) -> pd.DataFrame:
    """Every formula variant for (q, n) as a table; no enumeration"""
    rows = [
        ('gl2', 'FORMULA', gl2_size_formula(q, n)),
        ('idempotents', 'PAPER', count_idempotents_formula(q, n, p, IdempotentVariant.PAPER)),
        ('idempotents', 'ALT', count_idempotents_formula(q, n, p, IdempotentVariant.ALT)),
    ]
    for variant in ProductVariant:
        try:
            value = count_products_formula(q, n, variant, p)
        except NonIntegralFormula:
            value = None
        rows.append(('products', variant.value, value))
    if q == 3:
        rows.append(('products', 'ALPHA', example_formula_alpha(n)))
    df = pd.DataFrame(rows, columns=['quantity', 'variant', 'value'])
    df['value'] = df['value'].map(lambda v: None if v is None else str(v))
    return df


def _verdict(brute: Optional[int], candidates: Dict[str, int]) -> str:
    """Unique matching variant, 'TIED:A|B' for several, CONFLICT for none"""
    if brute is None:
        return 'UNDECIDED'
    matches = sorted(name for name, value in candidates.items() if value == brute)
    if not matches:
        return 'CONFLICT'
    if len(matches) == 1:
        return matches[0]
    return 'TIED:' + '|'.join(matches)


# ========== DENSE SETS & VECTORIZED KERNELS ==========

class CarrierSet:
    """Exact membership indicator over carrier codes"""

    def __init__(self, size: int, mask: Optional[np.ndarray] = None):
        self.size = size
        self.mask = np.zeros(size, dtype=bool) if mask is None else mask

    def add(self, codes: np.ndarray) -> None:
        self.mask[codes] = True

    def __contains__(self, code: int) -> bool:
        return bool(self.mask[code])

    def __len__(self) -> int:
        return int(np.count_nonzero(self.mask))

    def __eq__(self, other) -> bool:
        return isinstance(other, CarrierSet) and np.array_equal(self.mask, other.mask)

    def issubset(self, other: 'CarrierSet') -> bool:
        return not np.any(self.mask & ~other.mask)

    def codes(self) -> np.ndarray:
        return np.flatnonzero(self.mask)


class _Kernel:
    """Vectorized products, codes and unit tests over H(R) or M_2(R)"""

    def __init__(self, tables: RingTables, target: CarrierTarget):
        self.t = tables
        self.s = tables.size
        self.target = target

    def decode(self, codes: np.ndarray) -> Tuple[np.ndarray, ...]:
        s = self.s
        codes = np.asarray(codes, dtype=np.int64)
        e4 = codes % s
        rest = codes // s
        e3 = rest % s
        rest //= s
        e2 = rest % s
        e1 = rest // s
        return e1, e2, e3, e4

    def encode(self, comps) -> np.ndarray:
        s = self.s
        e1, e2, e3, e4 = (np.asarray(c, dtype=np.int64) for c in comps)
        return ((e1 * s + e2) * s + e3) * s + e4

    def product(self, x, y):
        T = self.t
        m, ad, sb = T.mul, T.add, T.sub
        a1, b1, c1, d1 = x
        a2, b2, c2, d2 = y
        if self.target is CarrierTarget.M2:
            return (ad(m(a1, a2), m(b1, c2)), ad(m(a1, b2), m(b1, d2)),
                    ad(m(c1, a2), m(d1, c2)), ad(m(c1, b2), m(d1, d2)))
        return (
            sb(sb(sb(m(a1, a2), m(b1, b2)), m(c1, c2)), m(d1, d2)),
            sb(ad(ad(m(a1, b2), m(b1, a2)), m(c1, d2)), m(d1, c2)),
            ad(ad(sb(m(a1, c2), m(b1, d2)), m(c1, a2)), m(d1, b2)),
            ad(sb(ad(m(a1, d2), m(b1, c2)), m(c1, b2)), m(d1, a2)),
        )

    def is_unit(self, comps) -> np.ndarray:
        """Unit determinant (M_2) or unit norm (H)"""
        T = self.t
        a, b, c, d = comps
        if self.target is CarrierTarget.M2:
            value = T.sub(T.mul(a, d), T.mul(b, c))
        else:
            value = T.add(T.add(T.mul(a, a), T.mul(b, b)), T.add(T.mul(c, c), T.mul(d, d)))
        return T.unit[value]


# ========== RESULTS ==========

@dataclass
class ClosureResult:
    """S_1 (idempotents) through the last computed S_r"""
    target: CarrierTarget
    sizes: List[int]
    stable_at: Optional[int]
    final: CarrierSet


@dataclass
class OrbitPartition:
    """Orbit id per carrier code (-1 outside every seed orbit) and brute sizes per label"""
    labels: List[OrbitLabel]
    orbit_id: np.ndarray
    sizes: List[Optional[int]]
    overlaps: List[Tuple[int, int]] = field(default_factory=list)


@dataclass
class CensusReport:
    ring: str
    target: str
    counts: Dict[str, Optional[int]]
    orbits: List[Dict[str, object]]
    verdicts: Dict[str, str]
    closure: List[int] = field(default_factory=list)

    def to_json_dict(self) -> Dict[str, object]:
        return json_ready(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def json_ready(value):
    """Recursively turn integers into decimal strings; missing values into None"""
    if value is None or value is pd.NA:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, dict):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    return value


# ========== THE RUNNER ==========

class CensusRunner:
    """
    Exhaustive oracles over H(R) or M_2(R)

    Args:
        ring: Coefficient ring
        config: Caps, worker count, block size and progress flag
    """

    def __init__(self, ring: ChainRing, config: Optional[CensusConfig] = None):
        self.ring = ring
        self.config = config or CensusConfig.from_env()
        self.matrices = MatrixRing2(ring)
        self._generators: Optional[List[Tuple[Tuple[int, ...], Tuple[int, ...]]]] = None

    # ---------- plumbing ----------

    def carrier_size(self) -> int:
        return self.ring.size ** 4

    def _check_carrier(self) -> int:
        size = self.carrier_size()
        if size > self.config.carrier_cap:
            raise CapExceeded('carrier', size, self.config.carrier_cap)
        return size

    def kernel(self, target: CarrierTarget) -> _Kernel:
        self._check_carrier()
        return _Kernel(self.ring.tables, CarrierTarget(target))

    def _code_blocks(self) -> Iterable[np.ndarray]:
        size = self.carrier_size()
        step = self.config.block_size
        starts = range(0, size, step)
        if self.config.progress:
            starts = tqdm(starts, desc='carrier', dynamic_ncols=True, ascii=True)
        for start in starts:
            yield np.arange(start, min(start + step, size), dtype=np.int64)

    def _matrix_codes(self, A: Mat2) -> Tuple[int, int, int, int]:
        return tuple(self.ring.index(e) for e in A.entries())

    # ---------- idempotents & closure ----------

    def brute_idempotents(self, target: CarrierTarget = CarrierTarget.M2) -> CarrierSet:
        """Every x with x*x = x, by exhaustive scan"""
        K = self.kernel(target)
        found = CarrierSet(self.carrier_size())
        for codes in self._code_blocks():
            comps = K.decode(codes)
            found.add(codes[K.encode(K.product(comps, comps)) == codes])
        logger.info("%s over %s: %d idempotents", target, self.ring.spec.to_string(), len(found))
        return found

    def _multiply_sets(self, K: _Kernel, left: np.ndarray, right: np.ndarray) -> CarrierSet:
        pairs = len(left) * len(right)
        if pairs > self.config.pair_cap:
            raise CapExceeded('pair products', pairs, self.config.pair_cap)

        rows_per_block = max(1, self.config.block_size // max(len(right), 1))
        blocks = [left[i:i + rows_per_block] for i in range(0, len(left), rows_per_block)]
        y = K.decode(right)

        def work(block: np.ndarray) -> np.ndarray:
            x = K.decode(np.repeat(block, len(right)))
            yy = tuple(np.tile(c, len(block)) for c in y)
            return K.encode(K.product(x, yy))

        out = CarrierSet(self.carrier_size())
        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                results = pool.map(work, blocks)
                if self.config.progress:
                    results = tqdm(results, total=len(blocks), desc='products', dynamic_ncols=True, ascii=True)
                for codes in results:
                    out.add(codes)
        else:
            it = tqdm(blocks, desc='products', dynamic_ncols=True, ascii=True) if self.config.progress else blocks
            for block in it:
                out.add(work(block))
        return out

    def brute_products_census(self, target: CarrierTarget = CarrierTarget.M2,
                              r_max: Optional[int] = None) -> ClosureResult:
        """
        S_1 = idempotents, S_(r+1) = S_r * S_1, until S_(r+1) = S_r or r = r_max

        Returns:
            ClosureResult with |S_r| per round and the least stable r (None if not reached)
        """
        target = CarrierTarget(target)
        r_max = r_max or self.config.r_max
        K = self.kernel(target)
        s1 = self.brute_idempotents(target)
        s1_codes = s1.codes()

        sizes = [len(s1)]
        current = s1
        stable_at = None
        for r in range(1, r_max + 1):
            nxt = self._multiply_sets(K, current.codes(), s1_codes)
            logger.info("|S_%d| = %d", r + 1, len(nxt))
            if nxt == current:
                stable_at = r
                break
            sizes.append(len(nxt))
            current = nxt

        if stable_at is None:
            logger.warning("Closure did not stabilize within r_max=%d", r_max)
        return ClosureResult(target, sizes, stable_at, current)

    # ---------- GL_2 and orbits ----------

    def brute_gl2_size(self) -> int:
        K = self.kernel(CarrierTarget.M2)
        return sum(int(np.count_nonzero(K.is_unit(K.decode(codes)))) for codes in self._code_blocks())

    def count_nonunits(self, target: CarrierTarget) -> int:
        K = self.kernel(target)
        return sum(int(np.count_nonzero(~K.is_unit(K.decode(codes)))) for codes in self._code_blocks())

    def brute_stabilizer_size(self, label: OrbitLabel) -> int:
        """Number of invertible P commuting with the label's representative"""
        K = self.kernel(CarrierTarget.M2)
        rep = self._matrix_codes(self.matrices.label_matrix(label))
        total = 0
        for codes in self._code_blocks():
            P = K.decode(codes)
            commutes = K.encode(K.product(P, rep)) == K.encode(K.product(rep, P))
            total += int(np.count_nonzero(commutes & K.is_unit(P)))
        return total

    def _orbit_generators(self):
        """Conjugation pairs (P, P^-1): E12(t), E21(t) for t != 0 and diag(u, 1) for units u != 1"""
        if self._generators is None:
            R, M = self.ring, self.matrices
            gens = []
            for t in R.enumerate_elements():
                if t == R.zero:
                    continue
                for P in (Mat2(R.one, t, R.zero, R.one), Mat2(R.one, R.zero, t, R.one)):
                    gens.append((P, M.inverse(P)))
            for u in R.enumerate_units():
                if u != R.one:
                    P = Mat2(u, R.zero, R.zero, R.one)
                    gens.append((P, M.inverse(P)))
            self._generators = [(self._matrix_codes(P), self._matrix_codes(Q)) for P, Q in gens]
        return self._generators

    def _bfs(self, K: _Kernel, seed: int, orbit_id: np.ndarray, label_id: int) -> int:
        orbit_id[seed] = label_id
        frontier = np.array([seed], dtype=np.int64)
        size = 1
        generators = self._orbit_generators()
        while frontier.size:
            comps = K.decode(frontier)
            images = [K.encode(K.product(K.product(P, comps), P_inv)) for P, P_inv in generators]
            new = np.unique(np.concatenate(images))
            new = new[orbit_id[new] < 0]
            orbit_id[new] = label_id
            size += int(new.size)
            frontier = new
        return size

    def brute_orbit_partition(self, labels: Optional[Sequence[OrbitLabel]] = None) -> OrbitPartition:
        """
        BFS every label's orbit into one shared orbit-id array

        A label whose representative already lies in an earlier orbit is recorded
        as an overlap and gets no size of its own.
        """
        K = self.kernel(CarrierTarget.M2)
        labels = list(self.matrices.labels()) if labels is None else list(labels)
        orbit_id = np.full(self.carrier_size(), -1, dtype=np.int32)
        sizes: List[Optional[int]] = []
        overlaps = []

        it = tqdm(labels, desc='orbits', dynamic_ncols=True, ascii=True) if self.config.progress else labels
        for i, label in enumerate(it):
            seed = int(K.encode(self._matrix_codes(self.matrices.label_matrix(label))))
            owner = int(orbit_id[seed])
            if owner >= 0:
                overlaps.append((owner, i))
                sizes.append(None)
                continue
            sizes.append(self._bfs(K, seed, orbit_id, i))

        if overlaps:
            logger.warning("%d orbit labels share an orbit with an earlier label", len(overlaps))
        return OrbitPartition(labels, orbit_id, sizes, overlaps)

    def brute_orbit_size(self, label: OrbitLabel) -> int:
        K = self.kernel(CarrierTarget.M2)
        orbit_id = np.full(self.carrier_size(), -1, dtype=np.int32)
        seed = int(K.encode(self._matrix_codes(self.matrices.label_matrix(label))))
        return self._bfs(K, seed, orbit_id, 0)

    # ---------- orchestration ----------

    def orbit_rows(self, brute: bool = True) -> List[Dict[str, object]]:
        """Per-label sizes under both variants, plus the BFS size when brute is set"""
        M = self.matrices
        labels = list(M.labels())
        brute_sizes: List[Optional[int]] = [None] * len(labels)
        if brute:
            brute_sizes = self.brute_orbit_partition(labels).sizes

        rows = []
        for label, size_brute in zip(labels, brute_sizes):
            rows.append({
                'a': format_element(self.ring, label.a),
                'bclass': label.bclass,
                'size_statement': M.orbit_size(label, OrbitVariant.STATEMENT),
                'size_proof': M.orbit_size(label, OrbitVariant.PROOF),
                'size_brute': size_brute,
            })
        return rows

    def run_verification(self, target: CarrierTarget = CarrierTarget.M2,
                         r_max: Optional[int] = None) -> CensusReport:
        """
        Compare every formula variant against exhaustive enumeration

        Orbit and GL_2 quantities are always taken over M_2(R); idempotent and
        product counts over the chosen target.
        """
        target = CarrierTarget(target)
        R = self.ring
        q, n = R.q, R.n
        formula_p = R.p if target is CarrierTarget.H else None
        logger.info("Verification of %s over %s", target.value, R.spec.to_string())

        # 1. Idempotents and closure
        closure = self.brute_products_census(target, r_max)
        idempotents_brute = closure.sizes[0]
        products_brute = len(closure.final)

        # 2. Units
        K = self.kernel(target)
        final_comps = K.decode(closure.final.codes())
        products_noninvertible = int(np.count_nonzero(~K.is_unit(final_comps)))

        # 3. GL_2 and orbits over M_2(R)
        gl2_brute = self.brute_gl2_size()
        orbit_rows = self.orbit_rows(brute=True)
        partition_total = 1 + sum(row['size_brute'] or 0 for row in orbit_rows)

        # 4. Formulas
        idem_candidates = {v.value: count_idempotents_formula(q, n, formula_p, v) for v in IdempotentVariant}
        product_candidates = {}
        for variant in ProductVariant:
            try:
                product_candidates[variant.value] = count_products_formula(q, n, variant, formula_p)
            except NonIntegralFormula:
                logger.warning("%s is not integral at q=%d n=%d", variant.value, q, n)

        counts = {
            'idempotents_brute': idempotents_brute,
            'idempotents_formula_paper': idem_candidates['PAPER'],
            'idempotents_formula_alt': idem_candidates['ALT'],
            'products_brute': products_brute,
            'products_closed_form': product_candidates.get('CLOSED'),
            'products_orbitsum_statement': product_candidates.get('ORBITSUM_STATEMENT'),
            'products_orbitsum_proof': product_candidates.get('ORBITSUM_PROOF'),
            'gl2_brute': gl2_brute,
            'gl2_formula': gl2_size_formula(q, n),
            'closure_stable_at_r': closure.stable_at,
            'noninvertible_brute': self.count_nonunits(target),
            'products_noninvertible_brute': products_noninvertible,
            'orbit_partition_total': partition_total,
        }

        # 5. Verdicts
        orbit_matches = {v.value for v in OrbitVariant}
        for row in orbit_rows:
            for v, key in ((OrbitVariant.STATEMENT, 'size_statement'), (OrbitVariant.PROOF, 'size_proof')):
                if row['size_brute'] is not None and row[key] != row['size_brute']:
                    orbit_matches.discard(v.value)
        if not orbit_matches:
            orbit_verdict = 'CONFLICT'
        elif len(orbit_matches) == 1:
            orbit_verdict = orbit_matches.pop()
        else:
            orbit_verdict = 'TIED:' + '|'.join(sorted(orbit_matches))

        stable = closure.stable_at
        verdicts = {
            'idempotents': _verdict(idempotents_brute, idem_candidates),
            'products': _verdict(products_brute, product_candidates),
            'orbits': orbit_verdict,
            'gl2': _verdict(gl2_brute, {'FORMULA': counts['gl2_formula']}),
            'twoisall': 'UNDECIDED' if stable is None else ('CONFIRMED' if stable <= 2 else 'REFUTED'),
            'products_tally': ('INCLUDES_IDENTITY' if products_brute - products_noninvertible == 1
                               else f'INVERTIBLE_{products_brute - products_noninvertible}'),
        }
        for key, verdict in verdicts.items():
            if verdict == 'CONFLICT':
                logger.warning("No formula variant matches brute force for %s", key)

        return CensusReport(ring=R.spec.to_string(), target=target.value, counts=counts,
                            orbits=orbit_rows, verdicts=verdicts, closure=closure.sizes)


# ========== TABLES ==========

def closure_table(closure: ClosureResult) -> pd.DataFrame:
    sizes = closure.sizes
    df = pd.DataFrame({'r': range(1, len(sizes) + 1), 'size': sizes})
    df['new_elements'] = df['size'].diff().fillna(df['size']).astype(int)
    df['stable'] = df['r'] == (closure.stable_at or 0)
    return df


def table_records(df: pd.DataFrame) -> List[Dict[str, object]]:
    return json_ready(df.to_dict(orient='records'))


def orbit_table(rows: List[Dict[str, object]]) -> pd.DataFrame:
    df = pd.DataFrame(rows, columns=['a', 'bclass', 'size_statement', 'size_proof', 'size_brute'])
    df['size_brute'] = df['size_brute'].astype('Int64')
    return df


# ========== MODULE-LEVEL OPERATIONS ==========

def brute_idempotents(ring: ChainRing, target: CarrierTarget = CarrierTarget.M2,
                      config: Optional[CensusConfig] = None) -> CarrierSet:
    return CensusRunner(ring, config).brute_idempotents(target)


def brute_products_census(ring: ChainRing, target: CarrierTarget = CarrierTarget.M2,
                          r_max: Optional[int] = None, config: Optional[CensusConfig] = None) -> ClosureResult:
    return CensusRunner(ring, config).brute_products_census(target, r_max)


def brute_orbit_size(label: OrbitLabel, ring: ChainRing, config: Optional[CensusConfig] = None) -> int:
    return CensusRunner(ring, config).brute_orbit_size(label)


def run_verification(ring: ChainRing, target: CarrierTarget = CarrierTarget.M2,
                     r_max: Optional[int] = None, config: Optional[CensusConfig] = None) -> CensusReport:
    return CensusRunner(ring, config).run_verification(target, r_max)
