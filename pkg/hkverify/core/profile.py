# profile.py
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
Discrete opinion profiles: sorted vectors of n opinions carried in one arithmetic
context. Agents are numbered 1..n in the public interface; the underlying numpy
array is 0-based.
"""

import logging
import warnings

from fractions import Fraction
from typing import Any, Iterable, List, Optional, Tuple

import numpy as np

import hkverify.core.constants as const
import hkverify.io_utils.fileio_serializers as serializers
import hkverify.settings as settings

from hkverify.core.descriptors import ReadOnlyProperty
from hkverify.core.errors import DomainError
from hkverify.core.numerics import ArithmeticContext, exact, get_context
from hkverify.utils.typedefs import BoundScalar, ScalarLike

LOGGER = logging.getLogger(__name__)


def _check_sorted(ctx: ArithmeticContext, values: np.ndarray) -> None:
    for index in range(1, len(values)):
        previous, current = values[index - 1], values[index]
        if previous is current:
            continue
        if not ctx.endpoints_le(previous, current):
            raise DomainError(
                "opinions must be non-decreasing: agent {} exceeds agent {}".format(
                    index, index + 1
                )
            )


class Profile(serializers.Serializable):
    """Non-decreasing vector of n opinions in a given arithmetic mode.

    Parameters
    ----------
    opinions:
        opinion values, anything the arithmetic context can convert (ints,
        Fractions, floats, ``p/q`` or decimal literals, (lo, hi) pairs)
    mode:
        'rational', 'ball' or 'float'; default: `settings.ARITH_MODE`
    precision_bits:
        working precision of ball mode; default: `settings.PRECISION_BITS`
    center:
        exact symmetry center c with f(i) + f(n+1-i) = c, if known by construction.
        In ball mode this is how symmetry of the enclosed exact profile is tracked.
    """

    values = ReadOnlyProperty(np.ndarray, "0-based array of opinion scalars")
    ctx = ReadOnlyProperty(ArithmeticContext, "arithmetic context of the opinions")
    center = ReadOnlyProperty(Fraction, "known symmetry center, or None")

    def __init__(
        self,
        opinions: Iterable[ScalarLike],
        mode: Optional[str] = None,
        precision_bits: Optional[int] = None,
        center: Optional[ScalarLike] = None,
    ) -> None:
        ctx = get_context(mode, precision_bits)
        values = ctx.array(opinions)
        if len(values) < 1:
            raise DomainError("a profile needs at least one agent")
        _check_sorted(ctx, values)
        if ctx.mode == "rational" and len(values) > settings.RATIONAL_AGENT_WARNING:
            warnings.warn(
                "rational mode on {} agents: denominators may grow quickly".format(
                    len(values)
                ),
                Warning,
            )
        self._values = values
        self._ctx = ctx
        self._center = None if center is None else exact(center)

    @classmethod
    def from_array(
        cls,
        values: np.ndarray,
        ctx: ArithmeticContext,
        center: Optional[Fraction] = None,
    ) -> "Profile":
        """Wrap an array of scalars already in `ctx` without re-validation. Used by
        operations whose output is sorted by construction."""
        profile = cls.__new__(cls)
        profile._values = values
        profile._ctx = ctx
        profile._center = center
        return profile

    @property
    def n(self) -> int:
        return len(self._values)

    @property
    def mode(self) -> str:
        return self._ctx.mode

    @property
    def precision_bits(self) -> Optional[int]:
        return self._ctx.precision_bits

    def __len__(self) -> int:
        return len(self._values)

    def opinion(self, i: int) -> BoundScalar:
        """Opinion of agent `i` (1-based)."""
        if not 1 <= i <= self.n:
            raise DomainError("agent index {} outside 1..{}".format(i, self.n))
        return self._values[i - 1]

    def first(self) -> BoundScalar:
        return self._values[0]

    def last(self) -> BoundScalar:
        return self._values[-1]

    def endpoints(self) -> List[Tuple[Fraction, Fraction]]:
        """Exact (lo, hi) pairs of all opinions."""
        return [(self._ctx.lo(value), self._ctx.hi(value)) for value in self._values]

    def float_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Nearest-rounded float approximations of the lower and upper endpoints."""
        if self.mode == "float":
            array = np.asarray(self._values, dtype=np.float64)
            return array, array
        bounds = np.asarray(
            [self._ctx.float_bounds(value) for value in self._values], dtype=np.float64
        )
        return bounds[:, 0], bounds[:, 1]

    def as_fractions(self) -> List[Fraction]:
        """Exact opinions; only defined when every opinion is a point."""
        fractions = []
        for value in self._values:
            low = self._ctx.lo(value)
            if self._ctx.hi(value) != low:
                raise DomainError("opinion {} is not a point value".format(value))
            fractions.append(low)
        return fractions

    def with_context(
        self, mode: str, precision_bits: Optional[int] = None
    ) -> "Profile":
        """Same opinions converted to another arithmetic mode."""
        ctx = get_context(mode, precision_bits)
        if ctx == self._ctx:
            return self
        if self.mode == "ball" and ctx.mode != "float":
            converted = [
                (self._ctx.lo(value), self._ctx.hi(value)) for value in self._values
            ]
        else:
            converted = list(self._values)
        return Profile(converted, mode=ctx.mode, precision_bits=ctx.precision_bits,
                       center=self._center)

    def equals(self, other: "Profile") -> bool:
        """Exact equality of all opinions (identity of objects in ball mode)."""
        if self.n != other.n:
            return False
        return all(
            self._ctx.identical(a, b) for a, b in zip(self._values, other._values)
        )

    def diameter(self) -> BoundScalar:
        return diameter(self)

    def clusters(self) -> "ClusterDecomposition":
        return clusters(self)

    def __repr__(self) -> str:
        shown = ", ".join(self._ctx.format(value)[0] for value in self._values[:6])
        if self.n > 6:
            shown += ", ..."
        return "Profile(n={}, mode={}, [{}])".format(self.n, self.mode, shown)

    # file IO ------------------------------------------------------------------------
    def rows(self) -> List[List[str]]:
        rows = []
        for index, value in enumerate(self._values, start=1):
            low, high = self._ctx.format(value)
            rows.append([str(index), low, high])
        return rows

    def serialize(self) -> "serializers.IOData":
        from hkverify.io_utils.fileio import IOData

        return IOData(
            "Profile",
            {"columns": const.PROFILE_HEADER, "mode": self.mode},
            {"table": np.asarray(self.rows(), dtype=object)},
        )

    @classmethod
    def deserialize(cls, io_data: "serializers.IOData") -> "Profile":
        table = io_data.ndarrays["table"]
        mode = io_data.attributes.get("mode")
        return cls.from_rows(table, mode=mode)

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[List[str]],
        mode: Optional[str] = None,
        precision_bits: Optional[int] = None,
    ) -> "Profile":
        """Profile from (index, opinion_lo, opinion_hi) string rows."""
        ctx = get_context(mode, precision_bits)
        rows = sorted(rows, key=lambda row: int(row[0]))
        for position, row in enumerate(rows, start=1):
            if int(row[0]) != position:
                raise DomainError("agent indices must run 1..n without gaps")
        values = np.asarray([ctx.parse(row[1], row[2]) for row in rows], dtype=object)
        if ctx.mode == "float":
            values = values.astype(np.float64)
        _check_sorted(ctx, values)
        return cls.from_array(values, ctx)


class ClusterDecomposition:
    """Maximal runs of agents sharing one opinion.

    Parameters
    ----------
    opinions:
        one opinion scalar per cluster, in increasing order
    sizes:
        number of agents per cluster
    separations:
        gaps between consecutive cluster opinions
    frozen:
        True iff every separation is certainly greater than 1
    """

    def __init__(
        self,
        opinions: List[BoundScalar],
        sizes: List[int],
        separations: List[BoundScalar],
        frozen: bool,
    ) -> None:
        self.opinions = opinions
        self.sizes = sizes
        self.separations = separations
        self.frozen = frozen

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def is_consensus(self) -> bool:
        return len(self.sizes) == 1

    def starts(self) -> List[int]:
        """1-based index of the first agent of each cluster."""
        starts = [1]
        for size in self.sizes[:-1]:
            starts.append(starts[-1] + size)
        return starts

    def __len__(self) -> int:
        return len(self.sizes)

    def __repr__(self) -> str:
        return "ClusterDecomposition(sizes={}, frozen={})".format(
            self.sizes, self.frozen
        )


# construction -------------------------------------------------------------------------


def equally_spaced(
    n: int,
    L: ScalarLike,
    offset: ScalarLike = 0,
    mode: Optional[str] = None,
    precision_bits: Optional[int] = None,
) -> Profile:
    """Canonical equally spaced profile on `n` agents with diameter `L`, i.e.
    f(i) = (i-1)L/(n-1) + offset.

    The spacing L/(n-1) is the one for which canonical refinement maps
    equally_spaced(n, L) onto equally_spaced(n + (n-1)k, L).
    """
    if n < 2:
        raise DomainError("equally spaced profiles need n >= 2, got {}".format(n))
    length = exact(L)
    shift = exact(offset)
    if length < 0:
        raise DomainError("diameter L must be non-negative, got {}".format(L))
    ctx = get_context(mode, precision_bits)
    exact_values = [Fraction(i, n - 1) * length + shift for i in range(n)]
    values = ctx.array(exact_values)
    return Profile.from_array(values, ctx, center=length + 2 * shift)


def from_values(
    values: Iterable[ScalarLike],
    mode: Optional[str] = None,
    precision_bits: Optional[int] = None,
    sort: bool = False,
) -> Profile:
    """Profile from explicit opinions, optionally sorting them first."""
    values = list(values)
    if sort:
        values = sorted(values, key=exact)
    return Profile(values, mode=mode, precision_bits=precision_bits)


def uniform_random(
    n: int,
    L: ScalarLike,
    rng: Optional[np.random.Generator] = None,
    mode: Optional[str] = None,
    precision_bits: Optional[int] = None,
) -> Profile:
    """Sorted sample of `n` i.i.d. uniform opinions on [0, L]: the empirical quantile
    profile of U[0, L]."""
    if n < 1:
        raise DomainError("need at least one agent, got n={}".format(n))
    rng = settings.RNG if rng is None else rng
    length = float(exact(L))
    sample = np.sort(rng.uniform(0.0, length, size=n))
    ctx = get_context(mode, precision_bits)
    return Profile.from_array(ctx.array(sample), ctx)


def _interpolant(
    ctx: ArithmeticContext, left: BoundScalar, right: BoundScalar, weight: Fraction
) -> BoundScalar:
    if ctx.is_point(left) and ctx.is_point(right):
        low, high = ctx.lo(left), ctx.lo(right)
        return ctx.convert(low + (high - low) * weight)
    return left + (right - left) * ctx.convert(weight)


def refine_canonical(f: Profile, k: int) -> Profile:
    """Canonical k-regular refinement: k arithmetic-progression interpolants between
    each pair of consecutive agents; agent i of `f` becomes agent i + (i-1)k."""
    if k < 0:
        raise DomainError("refinement order k must be non-negative, got {}".format(k))
    if f.n < 2:
        raise DomainError("refinement needs at least two agents")
    if k == 0:
        return f
    ctx = f.ctx
    source = f.values
    refined = np.empty(f.n + (f.n - 1) * k, dtype=source.dtype)
    refined[:: k + 1] = source
    for step in range(1, k + 1):
        weight = Fraction(step, k + 1)
        if ctx.mode == "float":
            refined[step :: k + 1] = source[:-1] + (source[1:] - source[:-1]) * float(
                weight
            )
            continue
        refined[step :: k + 1] = [
            _interpolant(ctx, source[index], source[index + 1], weight)
            for index in range(f.n - 1)
        ]
    return Profile.from_array(refined, ctx, center=f.center)


def refine(f: Profile, k: int, interpolants: Any) -> Profile:
    """General k-regular refinement with explicit interpolant opinions.

    Parameters
    ----------
    f:
        profile on n agents
    k:
        number of agents inserted between each consecutive pair
    interpolants:
        array-like of shape (n-1, k); row i holds the opinions inserted between
        agents i+1 and i+2. The result must be non-decreasing.
    """
    rows = [list(row) for row in interpolants]
    if len(rows) != f.n - 1 or any(len(row) != k for row in rows):
        raise DomainError(
            "interpolants must have shape ({}, {})".format(f.n - 1, k)
        )
    ctx = f.ctx
    opinions: List[BoundScalar] = []
    for index in range(f.n - 1):
        opinions.append(f.values[index])
        opinions.extend(ctx.convert(value) for value in rows[index])
    opinions.append(f.values[-1])
    values = ctx.array(opinions)
    _check_sorted(ctx, values)
    return Profile.from_array(values, ctx)


def random_refinement(
    f: Profile, k: int, rng: Optional[np.random.Generator] = None, resolution: int = 64
) -> Profile:
    """Random k-regular refinement: sorted random interpolants between neighbors,
    drawn on a grid of `resolution` steps so that rational mode stays small."""
    rng = settings.RNG if rng is None else rng
    ctx = f.ctx
    rows = []
    for index in range(f.n - 1):
        left, right = f.values[index], f.values[index + 1]
        steps = np.sort(rng.integers(0, resolution + 1, size=k))
        rows.append(
            [
                _interpolant(ctx, left, right, Fraction(int(step), resolution))
                for step in steps
            ]
        )
    return refine(f, k, rows)


def coarsen(g: Profile, n: int, k: int) -> Profile:
    """Extract the original n agents out of a k-regular refinement:
    opinions[i] = g[i + (i-1)k]."""
    if n < 1 or k < 0:
        raise DomainError("coarsening needs n >= 1 and k >= 0")
    expected = n + (n - 1) * k
    if g.n != expected:
        raise DomainError(
            "profile has {} agents, a {}-regular refinement of {} agents has {}".format(
                g.n, k, n, expected
            )
        )
    return Profile.from_array(g.values[:: k + 1].copy(), g.ctx, center=g.center)


def translate(f: Profile, shift: ScalarLike) -> Profile:
    """Profile f + C."""
    ctx = f.ctx
    amount = ctx.convert(shift)
    if ctx.mode == "float":
        values = f.values + amount
    else:
        values = np.asarray([value + amount for value in f.values], dtype=object)
    center = None
    if f.center is not None:
        try:
            center = f.center + 2 * exact(shift)
        except DomainError:
            center = None
    return Profile.from_array(values, ctx, center=center)


# queries ------------------------------------------------------------------------------


def diameter(f: Profile) -> BoundScalar:
    """D(f) = f(n) - f(1)."""
    return f.ctx.sub(f.values[-1], f.values[0])


def is_symmetric(f: Profile) -> Tuple[bool, Optional[Fraction]]:
    """Whether f(i) + f(n+1-i) = c for a single c, and that c.

    Exact and float modes decide directly. Ball mode answers True only when the
    symmetry is known by construction (see `Profile.center`) or forced by point
    enclosures.
    """
    ctx = f.ctx
    values = f.values
    if ctx.mode == "ball":
        if f.center is not None:
            return True, f.center
        if not all(ctx.is_point(value) for value in values):
            return False, None
        exact_values = f.as_fractions()
    else:
        exact_values = [ctx.lo(value) for value in values]
    center = exact_values[0] + exact_values[-1]
    for index in range(f.n // 2 + 1):
        if exact_values[index] + exact_values[f.n - 1 - index] != center:
            return False, None
    return True, center


def runs(f: Profile) -> List[Tuple[int, int]]:
    """0-based half-open (start, stop) ranges of maximal runs of identical opinions."""
    ctx = f.ctx
    values = f.values
    boundaries: List[Tuple[int, int]] = []
    start = 0
    for index in range(1, f.n):
        if not ctx.identical(values[index - 1], values[index]):
            boundaries.append((start, index))
            start = index
    boundaries.append((start, f.n))
    return boundaries


def clusters(f: Profile) -> ClusterDecomposition:
    """Cluster decomposition: maximal runs of equal opinions (exact and float mode) or
    of structurally identical enclosures (ball mode)."""
    ctx = f.ctx
    one = ctx.one
    opinions, sizes = [], []
    for start, stop in runs(f):
        opinions.append(f.values[start])
        sizes.append(stop - start)
    separations = [
        ctx.sub(upper, lower) for lower, upper in zip(opinions[:-1], opinions[1:])
    ]
    frozen = all(ctx.certainly_greater(gap, one) for gap in separations)
    return ClusterDecomposition(opinions, sizes, separations, frozen)
