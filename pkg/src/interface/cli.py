# src/interface/cli.py - Command-line front end: ring info, factorization, censuses and formulas
import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
import sympy

from src.config import CensusConfig
from src.core.chainring import ChainRing, RingSpec
from src.intelligence.census import (
    CarrierTarget,
    CensusRunner,
    closure_table,
    formula_table,
    json_ready,
    orbit_table,
    table_records,
)
from src.intelligence.factorize import IdempotentFactorizer
from src.utils.errors import CapExceeded, IdemQuatError, WitnessVerificationError
from src.utils.literals import format_element, format_matrix, format_value, parse_value

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_VERIFICATION = 4


class _UserInputError(RuntimeError):
    """Bad flag values that argparse itself cannot catch"""


@dataclass(frozen=True)
class CliConfig:
    command: str
    ring: Optional[str] = None
    fmt: str = 'json'
    out: Optional[str] = None
    cap: Optional[int] = None
    pair_cap: Optional[int] = None
    workers: Optional[int] = None
    progress: bool = False
    verbose: bool = False
    element: Optional[str] = None
    target: str = 'm2'
    r_max: Optional[int] = None
    brute: Optional[bool] = None
    q: Optional[int] = None
    n: Optional[int] = None
    p: Optional[int] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'CliConfig':
        fields = cls.__dataclass_fields__
        return cls(**{k: v for k, v in vars(args).items() if k in fields})

    def census_config(self) -> CensusConfig:
        return CensusConfig.from_env(carrier_cap=self.cap, pair_cap=self.pair_cap,
                                     workers=self.workers, r_max=self.r_max, progress=self.progress)

    def make_ring(self) -> ChainRing:
        if not self.ring:
            raise _UserInputError("--ring is required")
        return ChainRing(RingSpec.parse(self.ring))


# ========== OUTPUT ==========

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + '\n', encoding='utf-8')
        logger.info("Wrote %s", out)
    else:
        print(text)


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2)


def _emit_table(df: pd.DataFrame, config: CliConfig, sheet: str = 'table') -> None:
    if config.fmt == 'csv':
        _emit(df.to_csv(index=False).rstrip('\n'), config.out)
    elif config.fmt == 'json':
        _emit(_dumps(table_records(df)), config.out)
    elif config.fmt == 'xlsx':
        if not config.out:
            raise _UserInputError("--format xlsx needs --out")
        df.to_excel(config.out, sheet_name=sheet, index=False, engine='openpyxl')
    else:
        _emit(df.to_string(index=False), config.out)


# ========== COMMANDS ==========

def cmd_ring_info(config: CliConfig) -> int:
    ring = config.make_ring()
    info = ring.describe()
    info['uniformizer'] = format_element(ring, ring.x)
    info['transversal'] = [format_element(ring, t) for t in ring.transversal]

    if config.fmt == 'text':
        lines = [
            f"📊 {info['spec']}",
            f"   p={ring.p} r={ring.r} n={ring.n} q={ring.q}",
            f"   |R| = {ring.size}, |U(R)| = {info['units']}, x = {info['uniformizer']}",
        ]
        lines += [f"   |J^{k}| = {size}" for k, size in info['ideal_sizes'].items()]
        lines.append("✅ 2 is invertible" if ring.two_is_invertible else "❌ 2 lies in J(R)")
        _emit('\n'.join(lines), config.out)
    else:
        _emit(_dumps(json_ready(info)), config.out)
    return EXIT_OK


def cmd_factor(config: CliConfig) -> int:
    ring = config.make_ring()
    if config.element is None:
        raise _UserInputError("--element is required")
    value = parse_value(ring, config.element)
    witness = IdempotentFactorizer(ring).factor(value, config.r_max)

    if witness is None:
        payload = {'decision': 'not factorizable', 'element': format_value(ring, value),
                   'e1': None, 'e2': None, 'conjugators': [], 'verified': True}
    else:
        payload = {
            'decision': 'product of two idempotents',
            'element': format_value(ring, value),
            'e1': format_value(ring, witness.e1),
            'e2': format_value(ring, witness.e2),
            'conjugators': [format_matrix(ring, P) for P in witness.conjugators],
            'verified': True,
        }
    _emit(_dumps(payload), config.out)
    return EXIT_OK


def cmd_verify(config: CliConfig) -> int:
    ring = config.make_ring()
    report = CensusRunner(ring, config.census_config()).run_verification(CarrierTarget(config.target), config.r_max)

    if config.fmt == 'text':
        lines = [f"📊 {report.ring} ({report.target})"]
        lines += [f"   {k}: {v}" for k, v in report.counts.items()]
        for key, verdict in report.verdicts.items():
            mark = '❌' if verdict == 'CONFLICT' else '✅'
            lines.append(f"{mark} {key}: {verdict}")
        _emit('\n'.join(lines), config.out)
    else:
        _emit(report.to_json(), config.out)
    return EXIT_OK


def cmd_census(config: CliConfig) -> int:
    ring = config.make_ring()
    runner = CensusRunner(ring, config.census_config())
    closure = runner.brute_products_census(CarrierTarget(config.target), config.r_max)
    table = closure_table(closure)

    if config.fmt == 'xlsx':
        if not config.out:
            raise _UserInputError("--format xlsx needs --out")
        orbits = orbit_table(runner.orbit_rows(brute=True))
        with pd.ExcelWriter(config.out, engine='openpyxl') as writer:
            table.to_excel(writer, sheet_name='closure', index=False)
            orbits.to_excel(writer, sheet_name='orbits', index=False)
        logger.info("Wrote %s", config.out)
        return EXIT_OK

    _emit_table(table, config, sheet='closure')
    return EXIT_OK


def cmd_orbits(config: CliConfig) -> int:
    ring = config.make_ring()
    runner = CensusRunner(ring, config.census_config())
    brute = config.brute
    if brute is None:
        brute = runner.carrier_size() <= runner.config.carrier_cap
        logger.debug("BFS orbit sizes %s by default", "on" if brute else "off")
    rows = runner.orbit_rows(brute=brute)
    _emit_table(orbit_table(rows), config, sheet='orbits')
    return EXIT_OK


def cmd_formulas(config: CliConfig) -> int:
    q, n, p = config.q, config.n, config.p
    if q is None or n is None:
        raise _UserInputError("--q and --n are required")
    if q < 2 or n < 1:
        raise _UserInputError("need q >= 2 and n >= 1")
    if p is not None:
        if not sympy.isprime(p):
            raise _UserInputError(f"p={p} is not prime")
        power = p
        while power < q:
            power *= p
        if power != q:
            raise _UserInputError(f"q={q} is not a power of p={p}")
    _emit_table(formula_table(q, n, p), config, sheet='formulas')
    return EXIT_OK


COMMANDS = {
    'ring-info': cmd_ring_info,
    'factor': cmd_factor,
    'verify': cmd_verify,
    'census': cmd_census,
    'orbits': cmd_orbits,
    'formulas': cmd_formulas,
}


# ========== PARSER ==========

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging on stderr')
    common.add_argument('--out', help='write output to this file')
    common.add_argument('--cap', type=int, help='carrier cap (overrides IDEMQUAT_CAP)')
    common.add_argument('--pair-cap', dest='pair_cap', type=int, help='pair-product cap per closure round')
    common.add_argument('--workers', type=int, help='threads for product sweeps')
    common.add_argument('--progress', action='store_true', help='show progress bars')

    ring_arg = argparse.ArgumentParser(add_help=False)
    ring_arg.add_argument('--ring', required=True, help="e.g. zpn:p=3,n=2 or tp:p=3,r=2,n=1,f=t^2+1")

    parser = argparse.ArgumentParser(prog='idemquat', description='Idempotent products in quaternion and 2x2 matrix rings')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('ring-info', parents=[common, ring_arg], help='ring parameters')
    p.add_argument('--format', dest='fmt', choices=['json', 'text'], default='json')

    p = sub.add_parser('factor', parents=[common, ring_arg], help='two-idempotent witness for one element')
    p.add_argument('--element', required=True, help="quaternion '1+2i+0j+0k' or matrix '[[1,0],[0,0]]'")
    p.add_argument('--rmax', dest='r_max', type=int)

    for name, help_text in (('verify', 'full formula-vs-brute-force report'),
                            ('census', 'closure sizes S_1, S_2, ...')):
        p = sub.add_parser(name, parents=[common, ring_arg], help=help_text)
        p.add_argument('--target', choices=['h', 'm2'], default='m2' if name == 'census' else 'h')
        p.add_argument('--rmax', dest='r_max', type=int)
        formats = ['json', 'text'] if name == 'verify' else ['csv', 'json', 'xlsx', 'text']
        p.add_argument('--format', dest='fmt', choices=formats, default='json')

    p = sub.add_parser('orbits', parents=[common, ring_arg], help='orbit labels with formula and BFS sizes')
    p.add_argument('--format', dest='fmt', choices=['csv', 'json', 'xlsx', 'text'], default='text')
    p.add_argument('--brute', action=argparse.BooleanOptionalAction, default=None,
                   help='BFS orbit sizes (default: on when the carrier fits the cap)')

    p = sub.add_parser('formulas', parents=[common], help='evaluate every counting formula')
    p.add_argument('--q', type=int, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--p', type=int)
    p.add_argument('--format', dest='fmt', choices=['csv', 'json', 'xlsx', 'text'], default='text')

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    config = CliConfig.from_args(args)
    logging.basicConfig(level=logging.DEBUG if config.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)

    try:
        return COMMANDS[config.command](config)
    except CapExceeded as exc:
        print(f"❌ cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except WitnessVerificationError as exc:
        logger.error("Witness failed re-verification: %s", exc)
        print(f"❌ internal verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (_UserInputError, IdemQuatError, OSError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
