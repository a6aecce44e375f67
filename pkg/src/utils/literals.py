# src/utils/literals.py - Element, quaternion and matrix literals for the CLI and reports
from typing import List, Union

from src.core.chainring import ChainRing, Element, RingKind
from src.core.mat2 import Mat2
from src.core.quaternion import Quaternion
from src.utils.errors import LiteralParseError, RingSpecError

_UNITS = ('i', 'j', 'k')


def _split_top_level(text: str, sep: str) -> List[str]:
    """Split on sep outside of brackets"""
    parts, depth, start = [], 0, 0
    for pos, ch in enumerate(text):
        if ch == '[':
            depth += 1
        elif ch == ']':
            depth -= 1
            if depth < 0:
                raise LiteralParseError(f"unbalanced brackets in {text!r}")
        elif ch == sep and depth == 0:
            parts.append(text[start:pos])
            start = pos + 1
    if depth != 0:
        raise LiteralParseError(f"unbalanced brackets in {text!r}")
    parts.append(text[start:])
    return parts


def _unwrap(text: str) -> str:
    if not (text.startswith('[') and text.endswith(']')):
        raise LiteralParseError(f"expected a bracketed list, got {text!r}")
    return text[1:-1]


# ========== ELEMENTS ==========

def format_element(ring: ChainRing, e: Element) -> str:
    if ring.kind is RingKind.ZPN:
        return str(e.coeffs[0])
    return '[' + ','.join(str(c) for c in e.coeffs) + ']'


def parse_element(ring: ChainRing, text: str) -> Element:
    """Decimal residue for Z/p^n, '[c0,c1,...]' otherwise"""
    text = ''.join(text.split())
    try:
        if ring.kind is RingKind.ZPN:
            return ring.element(int(text))
        return ring.element([int(c) for c in _split_top_level(_unwrap(text), ',')])
    except (ValueError, RingSpecError) as exc:
        if isinstance(exc, LiteralParseError):
            raise
        raise LiteralParseError(f"{text!r} is not an element of {ring.spec}: {exc}") from None


# ========== QUATERNIONS ==========

def format_quaternion(ring: ChainRing, x: Quaternion) -> str:
    c1, ci, cj, ck = (format_element(ring, c) for c in x.coefficients())
    return f"{c1}+{ci}i+{cj}j+{ck}k"


def parse_quaternion(ring: ChainRing, text: str) -> Quaternion:
    """
    Parse '<e>+<e>i+<e>j+<e>k'

    Whitespace is ignored, omitted terms are 0 and a bare unit ('i') has coefficient 1.
    """
    text = ''.join(text.split())
    if not text:
        raise LiteralParseError("empty quaternion literal")

    coeffs = {'1': ring.zero, 'i': ring.zero, 'j': ring.zero, 'k': ring.zero}
    seen = set()
    for term in _split_top_level(text, '+'):
        if not term:
            raise LiteralParseError(f"empty term in {text!r}")
        unit = term[-1] if term[-1] in _UNITS else '1'
        body = term[:-1] if unit != '1' else term
        if unit in seen:
            raise LiteralParseError(f"repeated {unit} term in {text!r}")
        seen.add(unit)
        coeffs[unit] = ring.one if unit != '1' and body == '' else parse_element(ring, body)

    return Quaternion(coeffs['1'], coeffs['i'], coeffs['j'], coeffs['k'])


# ========== MATRICES ==========

def format_matrix(ring: ChainRing, A: Mat2) -> str:
    e = [format_element(ring, x) for x in A.entries()]
    return f"[[{e[0]},{e[1]}],[{e[2]},{e[3]}]]"


def parse_matrix(ring: ChainRing, text: str) -> Mat2:
    text = ''.join(text.split())
    rows = _split_top_level(_unwrap(text), ',')
    if len(rows) != 2:
        raise LiteralParseError(f"matrix literal {text!r} needs two rows")
    entries = []
    for row in rows:
        cells = _split_top_level(_unwrap(row), ',')
        if len(cells) != 2:
            raise LiteralParseError(f"matrix row {row!r} needs two entries")
        entries.extend(parse_element(ring, cell) for cell in cells)
    return Mat2(*entries)


def is_matrix_literal(text: str) -> bool:
    """Two bracketed top-level items inside one bracket pair, and no top-level '+'"""
    text = ''.join(text.split())
    try:
        if len(_split_top_level(text, '+')) != 1 or not (text.startswith('[') and text.endswith(']')):
            return False
        items = _split_top_level(text[1:-1], ',')
    except LiteralParseError:
        return False
    return len(items) == 2 and all(item.startswith('[') for item in items)


def parse_value(ring: ChainRing, text: str) -> Union[Mat2, Quaternion]:
    if is_matrix_literal(text):
        return parse_matrix(ring, text)
    return parse_quaternion(ring, text)


def format_value(ring: ChainRing, value: Union[Mat2, Quaternion]) -> str:
    if isinstance(value, Quaternion):
        return format_quaternion(ring, value)
    return format_matrix(ring, value)
