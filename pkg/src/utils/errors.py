# src/utils/errors.py - Exception hierarchy shared by every IdemQuat module
from typing import Optional


class IdemQuatError(Exception):
    """Base class for every error raised by the library"""


# ========== RING CONSTRUCTION & INPUT ==========

class RingSpecError(IdemQuatError, ValueError):
    """Malformed ring spec string or invalid ring parameters"""


class NotPrime(RingSpecError):
    """The characteristic parameter p is not a prime"""


class InvalidModulus(RingSpecError):
    """The modulus polynomial is not monic or not irreducible modulo p"""


class LiteralParseError(IdemQuatError, ValueError):
    """An element, quaternion or matrix literal does not parse in the active ring"""


# ========== ARITHMETIC ==========

class NotAUnit(IdemQuatError, ArithmeticError):
    """Inversion of an element of the Jacobson radical"""


class NotInvertible(IdemQuatError, ArithmeticError):
    """A matrix whose determinant is not a unit"""


class NotUnimodular(IdemQuatError, ArithmeticError):
    """A row with no unit coordinate"""


class NotIdempotent(IdemQuatError, ArithmeticError):
    """A matrix that does not square to itself"""


class TrivialIdempotent(IdemQuatError, ArithmeticError):
    """The idempotents 0 and I have no rank-one diagonalization"""


class TwoNotInvertible(IdemQuatError, ArithmeticError):
    """2 lies in J(R); H(R) is local and has no matrix model"""


class NonIntegralStabilizer(IdemQuatError, ArithmeticError):
    """|GL_2(R)| is not divisible by the orbit size of the chosen variant"""


class NonIntegralFormula(IdemQuatError, ArithmeticError):
    """A counting formula whose fractional part does not cancel"""


# ========== RESOURCES & VERIFICATION ==========

class CapExceeded(IdemQuatError, RuntimeError):
    """An exhaustive sweep would exceed the configured carrier or pair budget"""

    def __init__(self, what: str, requested: int, cap: int):
        super().__init__(f"{what}: {requested} exceeds cap {cap}")
        self.what = what
        self.requested = requested
        self.cap = cap


class WitnessVerificationError(IdemQuatError, AssertionError):
    """A constructed witness failed re-verification"""

    def __init__(self, message: str, witness: Optional[object] = None):
        super().__init__(message)
        self.witness = witness
