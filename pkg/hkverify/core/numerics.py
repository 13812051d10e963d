# numerics.py
#
# This file is part of hkverify: certified simulation and consensus verification
# for bounded-confidence opinion dynamics.
#
#    Copyright (c) 2024 and later, the hkverify developers
#    All rights reserved.
#
#    This source code is licensed under the BSD-style license found in the
#    LICENSE file in the root directory of this source tree.
############################################################################
"""
Arithmetic kernel. Three interchangeable contexts share one contract:

- ``RationalContext``: exact ``fractions.Fraction`` arithmetic, lo = hi.
- ``BallContext``: outward-rounded intervals from an mpmath interval context of
  configurable working precision. Every result encloses the exact real value.
- ``FloatContext``: plain float64 for Monte-Carlo experiments; not certified.

Scalars are the raw values of the backend (``Fraction``, ``ivmpf``, ``float``) so
that hot loops may use Python operators directly; the context methods add
validation, comparisons with three-valued outcome, and endpoint access.
"""

import decimal
import enum
import functools
import math

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext

import hkverify.settings as settings

from hkverify.core.errors import DomainError, ResourceError
from hkverify.utils.typedefs import ArithMode, BoundScalar

# number of significant digits used when writing ball endpoints as decimals
DECIMAL_DIGITS = 40

MODES = ("rational", "ball", "float")


class Trichotomy(enum.Enum):
    """Outcome of comparing two enclosures."""

    CERTAINLY_LESS = "CertainlyLess"
    CERTAINLY_GREATER = "CertainlyGreater"
    CERTAINLY_EQUAL = "CertainlyEqual"
    UNKNOWN = "Unknown"

    @property
    def decided(self) -> bool:
        return self is not Trichotomy.UNKNOWN


def _floor_float(value: Fraction) -> float:
    """Largest float not exceeding `value`."""
    approx = float(value)
    if Fraction(approx) > value:
        approx = math.nextafter(approx, -math.inf)
    return approx


def _ceil_float(value: Fraction) -> float:
    """Smallest float not below `value`."""
    approx = float(value)
    if Fraction(approx) < value:
        approx = math.nextafter(approx, math.inf)
    return approx


def _mpf_fraction(raw: Any) -> Fraction:
    # libmp hands back gmpy2.mpz under the gmpy backend
    p, q = libmp.to_rational(raw)
    return Fraction(int(p), int(q))


def _decimal_string(value: Fraction, rounding: str) -> str:
    with decimal.localcontext() as dec_ctx:
        dec_ctx.prec = DECIMAL_DIGITS
        dec_ctx.rounding = rounding
        numerator = decimal.Decimal(int(value.numerator))
        quotient = numerator / decimal.Decimal(int(value.denominator))
    return str(quotient)


def parse_literal(text: str) -> Fraction:
    """Exact value of a decimal or ``p/q`` literal."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise DomainError(
            "'{}' is not a rational or decimal literal".format(text)
        ) from err


class ArithmeticContext(ABC):
    """Common interface of the arithmetic backends.

    Subclasses implement conversion, endpoint access and comparison; field
    operations default to the operators of the raw scalar type.
    """

    mode: str = ""
    certified: bool = True
    precision_bits: Optional[int] = None

    # construction ---------------------------------------------------------------------
    @abstractmethod
    def convert(self, value: Any) -> BoundScalar:
        """Turn an int, Fraction, float, literal string, scalar of this context, or a
        (lo, hi) pair into a scalar of this context."""

    @property
    def zero(self) -> BoundScalar:
        return self.convert(0)

    @property
    def one(self) -> BoundScalar:
        return self.convert(1)

    def array(self, values: Iterable[Any]) -> np.ndarray:
        return np.asarray([self.convert(value) for value in values], dtype=object)

    # field operations -----------------------------------------------------------------
    def add(self, a: BoundScalar, b: BoundScalar) -> BoundScalar:
        return a + b

    def sub(self, a: BoundScalar, b: BoundScalar) -> BoundScalar:
        return a - b

    def mul(self, a: BoundScalar, b: BoundScalar) -> BoundScalar:
        return a * b

    def neg(self, a: BoundScalar) -> BoundScalar:
        return -a

    def div(self, a: BoundScalar, b: Union[BoundScalar, int]) -> BoundScalar:
        if self.contains_zero(self.convert(b)):
            raise DomainError("division by an enclosure containing zero")
        return a / b

    @abstractmethod
    def contains_zero(self, a: BoundScalar) -> bool:
        pass

    @abstractmethod
    def min(self, a: BoundScalar, b: BoundScalar) -> BoundScalar:
        pass

    @abstractmethod
    def max(self, a: BoundScalar, b: BoundScalar) -> BoundScalar:
        pass

    def fsum(self, values: Iterable[BoundScalar]) -> BoundScalar:
        total = self.zero
        for value in values:
            total = total + value
        return total

    def average(self, values: Sequence[BoundScalar]) -> BoundScalar:
        if len(values) == 0:
            raise DomainError("average over an empty slice")
        return self.fsum(values) / len(values)

    def prefix_sums(self, values: np.ndarray) -> np.ndarray:
        """Array `P` of length n+1 with P[m] the sum of the first m entries."""
        sums = np.empty(len(values) + 1, dtype=object)
        sums[0] = self.zero
        if len(values):
            sums[1:] = np.cumsum(values)
        return sums

    # endpoints ------------------------------------------------------------------------
    @abstractmethod
    def lo(self, a: BoundScalar) -> Fraction:
        """Exact lower endpoint."""

    @abstractmethod
    def hi(self, a: BoundScalar) -> Fraction:
        """Exact upper endpoint."""

    def lo_float(self, a: BoundScalar) -> float:
        return _floor_float(self.lo(a))

    def hi_float(self, a: BoundScalar) -> float:
        return _ceil_float(self.hi(a))

    @abstractmethod
    def float_bounds(self, a: BoundScalar) -> Tuple[float, float]:
        """Fast float approximations (nearest rounding) of both endpoints."""

    @abstractmethod
    def lower(self, a: BoundScalar) -> BoundScalar:
        """Point scalar at the lower endpoint."""

    @abstractmethod
    def upper(self, a: BoundScalar) -> BoundScalar:
        """Point scalar at the upper endpoint."""

    def hull(self, values: Iterable[BoundScalar]) -> BoundScalar:
        values = list(values)
        low = functools.reduce(self.min, (self.lower(value) for value in values))
        high = functools.reduce(self.max, (self.upper(value) for value in values))
        return self.convert((low, high))

    def is_point(self, a: BoundScalar) -> bool:
        return self.lo(a) == self.hi(a)

    def identical(self, a: BoundScalar, b: BoundScalar) -> bool:
        """True if `a` and `b` certainly denote the same real number."""
        return self.compare(a, b) is Trichotomy.CERTAINLY_EQUAL

    # comparisons ----------------------------------------------------------------------
    @abstractmethod
    def compare(self, a: BoundScalar, b: BoundScalar) -> Trichotomy:
        pass

    def certainly_less(self, a: BoundScalar, b: BoundScalar) -> bool:
        return self.compare(a, b) is Trichotomy.CERTAINLY_LESS

    def certainly_greater(self, a: BoundScalar, b: BoundScalar) -> bool:
        return self.compare(a, b) is Trichotomy.CERTAINLY_GREATER

    @abstractmethod
    def certainly_le(self, a: BoundScalar, b: BoundScalar) -> bool:
        """True only if a ≤ b holds for every pair of point values."""

    def certainly_ge(self, a: BoundScalar, b: BoundScalar) -> bool:
        return self.certainly_le(b, a)

    def possibly_le(self, a: BoundScalar, b: BoundScalar) -> bool:
        return not self.certainly_greater(a, b)

    def endpoints_le(self, a: BoundScalar, b: BoundScalar) -> bool:
        """lo(a) <= lo(b) and hi(a) <= hi(b): the order required of sorted profiles."""
        return self.lo(a) <= self.lo(b) and self.hi(a) <= self.hi(b)

    # text -----------------------------------------------------------------------------
    @abstractmethod
    def format(self, a: BoundScalar) -> Tuple[str, str]:
        """Literal strings of the lower and upper endpoint."""

    def parse(self, lo_text: str, hi_text: Optional[str] = None) -> BoundScalar:
        if hi_text is None or hi_text.strip() == lo_text.strip():
            return self.convert(parse_literal(lo_text))
        return self.convert((parse_literal(lo_text), parse_literal(hi_text)))

    # guards ---------------------------------------------------------------------------
    def check(self, values: Iterable[BoundScalar]) -> None:
        """Raise ResourceError if the scalars exceed the configured size caps."""

    def __repr__(self) -> str:
        return "{}(precision_bits={})".format(type(self).__name__, self.precision_bits)

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, ArithmeticContext)
            and self.mode == other.mode
            and self.precision_bits == other.precision_bits
        )

    def __hash__(self) -> int:
        return hash((self.mode, self.precision_bits))


class RationalContext(ArithmeticContext):
    """Exact rational arithmetic via `fractions.Fraction`."""

    mode = "rational"

    def __init__(self, max_denominator_bits: Optional[int] = None) -> None:
        self.max_denominator_bits = (
            max_denominator_bits or settings.MAX_DENOMINATOR_BITS
        )

    def convert(self, value: Any) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, np.integer)):
            return Fraction(int(value))
        if isinstance(value, (float, np.floating)):
            return Fraction(float(value))
        if isinstance(value, str):
            return parse_literal(value)
        if isinstance(value, (tuple, list)) and len(value) == 2:
            low, high = (self.convert(entry) for entry in value)
            if low != high:
                raise DomainError(
                    "rational mode cannot represent the interval [{}, {}]".format(
                        low, high
                    )
                )
            return low
        raise DomainError("cannot convert {!r} to a rational scalar".format(value))

    def contains_zero(self, a: Fraction) -> bool:
        return a == 0

    def min(self, a: Fraction, b: Fraction) -> Fraction:
        return a if a <= b else b

    def max(self, a: Fraction, b: Fraction) -> Fraction:
        return a if a >= b else b

    def lo(self, a: Fraction) -> Fraction:
        return a

    def hi(self, a: Fraction) -> Fraction:
        return a

    def float_bounds(self, a: Fraction) -> Tuple[float, float]:
        approx = float(a)
        return approx, approx

    def lower(self, a: Fraction) -> Fraction:
        return a

    def upper(self, a: Fraction) -> Fraction:
        return a

    def compare(self, a: Fraction, b: Fraction) -> Trichotomy:
        if a < b:
            return Trichotomy.CERTAINLY_LESS
        if a > b:
            return Trichotomy.CERTAINLY_GREATER
        return Trichotomy.CERTAINLY_EQUAL

    def certainly_le(self, a: Fraction, b: Fraction) -> bool:
        return a <= b

    def endpoints_le(self, a: Fraction, b: Fraction) -> bool:
        return a <= b

    def identical(self, a: Fraction, b: Fraction) -> bool:
        return a == b

    def format(self, a: Fraction) -> Tuple[str, str]:
        text = str(a)
        return text, text

    def check(self, values: Iterable[Fraction]) -> None:
        widest = max((value.denominator.bit_length() for value in values), default=0)
        if widest > self.max_denominator_bits:
            raise ResourceError(
                "rational denominators reached {} bits (cap {}); switch to ball mode"
                " or raise settings.MAX_DENOMINATOR_BITS".format(
                    widest, self.max_denominator_bits
                )
            )

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, RationalContext)

    def __hash__(self) -> int:
        return hash(self.mode)


class BallContext(ArithmeticContext):
    """Outward-rounded interval arithmetic with `precision_bits` working precision.

    Each instance owns an mpmath interval context, so contexts of different
    precision coexist without touching mpmath's global state.
    """

    mode = "ball"

    def __init__(self, precision_bits: Optional[int] = None) -> None:
        self.precision_bits = int(precision_bits or settings.PRECISION_BITS)
        if self.precision_bits < 2:
            raise DomainError("precision_bits must be at least 2")
        self._iv = MPIntervalContext()
        self._iv.prec = self.precision_bits
        self._zero = self._iv.mpf(0)
        self._one = self._iv.mpf(1)

    @property
    def zero(self) -> Any:
        return self._zero

    @property
    def one(self) -> Any:
        return self._one

    def convert(self, value: Any) -> Any:
        if isinstance(value, self._iv.mpf):
            return value
        if isinstance(value, (bool, np.bool_)):
            raise DomainError("cannot convert a boolean to a ball scalar")
        if isinstance(value, (int, np.integer)):
            return self._iv.mpf(int(value))
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return self._iv.mpf(value.numerator)
            p, q = value.numerator, value.denominator
            prec = self.precision_bits
            return self._iv.make_mpf(
                (
                    libmp.from_rational(p, q, prec, libmp.round_floor),
                    libmp.from_rational(p, q, prec, libmp.round_ceiling),
                )
            )
        if isinstance(value, (float, np.floating)):
            return self._iv.mpf(float(value))
        if isinstance(value, str):
            return self.convert(parse_literal(value))
        if isinstance(value, (tuple, list)) and len(value) == 2:
            low, high = (self.convert(entry) for entry in value)
            if libmp.mpf_gt(low._mpi_[0], high._mpi_[1]):
                raise DomainError("interval endpoints are not ordered")
            return self._iv.make_mpf((low._mpi_[0], high._mpi_[1]))
        if hasattr(value, "_mpi_"):
            return self._iv.make_mpf(value._mpi_)
        raise DomainError("cannot convert {!r} to a ball scalar".format(value))

    def contains_zero(self, a: Any) -> bool:
        low, high = a._mpi_
        return libmp.mpf_le(low, libmp.fzero) and libmp.mpf_ge(high, libmp.fzero)

    def min(self, a: Any, b: Any) -> Any:
        (a0, a1), (b0, b1) = a._mpi_, b._mpi_
        low = a0 if libmp.mpf_le(a0, b0) else b0
        high = a1 if libmp.mpf_le(a1, b1) else b1
        return self._iv.make_mpf((low, high))

    def max(self, a: Any, b: Any) -> Any:
        (a0, a1), (b0, b1) = a._mpi_, b._mpi_
        low = a0 if libmp.mpf_ge(a0, b0) else b0
        high = a1 if libmp.mpf_ge(a1, b1) else b1
        return self._iv.make_mpf((low, high))

    def lo(self, a: Any) -> Fraction:
        return _mpf_fraction(a._mpi_[0])

    def hi(self, a: Any) -> Fraction:
        return _mpf_fraction(a._mpi_[1])

    def float_bounds(self, a: Any) -> Tuple[float, float]:
        low, high = a._mpi_
        return libmp.to_float(low), libmp.to_float(high)

    def lower(self, a: Any) -> Any:
        low = a._mpi_[0]
        return self._iv.make_mpf((low, low))

    def upper(self, a: Any) -> Any:
        high = a._mpi_[1]
        return self._iv.make_mpf((high, high))

    def is_point(self, a: Any) -> bool:
        low, high = a._mpi_
        return libmp.mpf_eq(low, high)

    def identical(self, a: Any, b: Any) -> bool:
        # the same object stems from the same computation, hence the same real value
        if a is b:
            return True
        return (
            self.is_point(a)
            and self.is_point(b)
            and libmp.mpf_eq(a._mpi_[0], b._mpi_[0])
        )

    def compare(self, a: Any, b: Any) -> Trichotomy:
        (a0, a1), (b0, b1) = a._mpi_, b._mpi_
        if libmp.mpf_lt(a1, b0):
            return Trichotomy.CERTAINLY_LESS
        if libmp.mpf_gt(a0, b1):
            return Trichotomy.CERTAINLY_GREATER
        return Trichotomy.UNKNOWN

    def certainly_le(self, a: Any, b: Any) -> bool:
        return libmp.mpf_le(a._mpi_[1], b._mpi_[0])

    def endpoints_le(self, a: Any, b: Any) -> bool:
        (a0, a1), (b0, b1) = a._mpi_, b._mpi_
        return libmp.mpf_le(a0, b0) and libmp.mpf_le(a1, b1)

    def width(self, a: Any) -> Fraction:
        return self.hi(a) - self.lo(a)

    def format(self, a: Any) -> Tuple[str, str]:
        return (
            _decimal_string(self.lo(a), decimal.ROUND_FLOOR),
            _decimal_string(self.hi(a), decimal.ROUND_CEILING),
        )


class FloatContext(ArithmeticContext):
    """Plain float64 arithmetic. Results carry no enclosure guarantee."""

    mode = "float"
    certified = False

    def convert(self, value: Any) -> float:
        if isinstance(value, str):
            return float(parse_literal(value))
        if isinstance(value, (tuple, list)) and len(value) == 2:
            low, high = (self.convert(entry) for entry in value)
            return 0.5 * (low + high)
        if hasattr(value, "_mpi_"):
            low, high = value._mpi_
            return 0.5 * (libmp.to_float(low) + libmp.to_float(high))
        return float(value)

    def array(self, values: Iterable[Any]) -> np.ndarray:
        return np.asarray([self.convert(value) for value in values], dtype=np.float64)

    def prefix_sums(self, values: np.ndarray) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(np.asarray(values, dtype=np.float64))))

    def contains_zero(self, a: float) -> bool:
        return a == 0.0

    def min(self, a: float, b: float) -> float:
        return min(a, b)

    def max(self, a: float, b: float) -> float:
        return max(a, b)

    def lo(self, a: float) -> Fraction:
        return Fraction(float(a))

    def hi(self, a: float) -> Fraction:
        return Fraction(float(a))

    def lo_float(self, a: float) -> float:
        return float(a)

    def hi_float(self, a: float) -> float:
        return float(a)

    def float_bounds(self, a: float) -> Tuple[float, float]:
        return float(a), float(a)

    def lower(self, a: float) -> float:
        return a

    def upper(self, a: float) -> float:
        return a

    def compare(self, a: float, b: float) -> Trichotomy:
        if a < b:
            return Trichotomy.CERTAINLY_LESS
        if a > b:
            return Trichotomy.CERTAINLY_GREATER
        return Trichotomy.CERTAINLY_EQUAL

    def certainly_le(self, a: float, b: float) -> bool:
        return a <= b

    def endpoints_le(self, a: float, b: float) -> bool:
        return a <= b

    def identical(self, a: float, b: float) -> bool:
        return a == b

    def format(self, a: float) -> Tuple[str, str]:
        text = repr(float(a))
        return text, text


@functools.lru_cache(maxsize=None)
def _cached_context(mode: str, precision_bits: Optional[int]) -> ArithmeticContext:
    if mode == "rational":
        return RationalContext()
    if mode == "ball":
        return BallContext(precision_bits)
    if mode == "float":
        return FloatContext()
    raise DomainError(
        "unknown arithmetic mode '{}'; supported: {}".format(mode, ", ".join(MODES))
    )


def get_context(
    mode: Optional[ArithMode] = None, precision_bits: Optional[int] = None
) -> ArithmeticContext:
    """Return the (shared) context for `mode`, defaulting to `settings.ARITH_MODE` and
    `settings.PRECISION_BITS`."""
    mode = mode or settings.ARITH_MODE
    if mode == "ball":
        precision_bits = int(precision_bits or settings.PRECISION_BITS)
    else:
        precision_bits = None
    return _cached_context(mode, precision_bits)


def exact(value: Any) -> Fraction:
    """Exact Fraction of an int, float, literal or Fraction; scalars of a context are
    rejected unless they are points."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return parse_literal(value)
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    raise DomainError("cannot interpret {!r} as an exact number".format(value))


def margin_summary(ctx: ArithmeticContext, margin: BoundScalar) -> List[float]:
    """[lo, hi] of `margin` rounded outward to floats."""
    return [ctx.lo_float(margin), ctx.hi_float(margin)]
