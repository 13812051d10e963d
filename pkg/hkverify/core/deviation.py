# deviation.py
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
Deviation envelopes: per-agent bounds (e_l, e_r) such that, for every k-regular
refinement g of a profile f whose coarsening deviates from f within the bounds,
the coarsening of U^t g stays within [U^t f(i) - e_l^t(i), U^t f(i) + e_r^t(i)].

One propagation step uses the four arrow sets of agent i (with f = U^t f):

    right-add     {j > i : f(i)+1 < f(j) <= f(i)+1+e_r(i)+e_l(j)}
    right-remove  {j < i : f(i)-1 <= f(j) < f(i)-1+e_r(i)+e_l(j)}
    left-add      {j < i : f(i)-1-e_l(i)-e_r(j) <= f(j) < f(i)-1}
    left-remove   {j > i : f(i)+1-e_l(i)-e_r(j) < f(j) <= f(i)+1}

and the bounds

    e_r'(i) = <f + e_r>_{N_i \\ right-remove} + 2|right-add| / (|N_i| + |right-add|
              - |right-remove|) - Uf(i) + 2/n_i
    e_l'(i) = -<f - e_l>_{N_i \\ left-remove} + 2|left-add| / (|N_i| + |left-add|
              - |left-remove|) + Uf(i) + 2/n_i

with n_i = |N_i| - |right-remove| - |left-remove|, the certified minimum number of
neighbors in the perturbed refined profile.
"""

import itertools
import logging

from fractions import Fraction
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

import hkverify.settings as settings

from hkverify.core.errors import CertificationFailure, DomainError
from hkverify.core.numerics import ArithmeticContext, Trichotomy, exact
from hkverify.core.profile import Profile
from hkverify.core.storage import EnvelopeTrace
from hkverify.core.update import NeighborhoodIndex, neighborhoods, update
from hkverify.utils.misc import progress
from hkverify.utils.typedefs import BoundScalar, IndexList, ScalarLike, StopCriterion

LOGGER = logging.getLogger(__name__)

_LESS = frozenset([Trichotomy.CERTAINLY_LESS])
_LESS_EQUAL = frozenset([Trichotomy.CERTAINLY_LESS, Trichotomy.CERTAINLY_EQUAL])
_GREATER = frozenset([Trichotomy.CERTAINLY_GREATER])
_GREATER_EQUAL = frozenset([Trichotomy.CERTAINLY_GREATER, Trichotomy.CERTAINLY_EQUAL])


class DeviationEnvelope:
    """Non-negative left and right deviation bounds, one pair per agent.

    Parameters
    ----------
    e_l, e_r:
        bounds in agent order; anything `ctx` converts
    ctx:
        arithmetic context of the bounds
    """

    def __init__(
        self,
        e_l: Sequence[ScalarLike],
        e_r: Sequence[ScalarLike],
        ctx: ArithmeticContext,
    ) -> None:
        if len(e_l) != len(e_r):
            raise DomainError("e_l and e_r must have equal length")
        self.ctx = ctx
        self.e_l = ctx.array(e_l)
        self.e_r = ctx.array(e_r)
        zero = ctx.zero
        for side in (self.e_l, self.e_r):
            if any(ctx.certainly_less(value, zero) for value in side):
                raise DomainError("deviation bounds must be non-negative")

    @classmethod
    def zeros(cls, n: int, ctx: ArithmeticContext) -> "DeviationEnvelope":
        return cls([0] * n, [0] * n, ctx)

    @classmethod
    def tent(
        cls, n: int, eps: ScalarLike, ctx: ArithmeticContext
    ) -> "DeviationEnvelope":
        """Tent-shaped seed bounds

            e_r(i) = max(0, 2i-n-1)/(n+1) * eps
            e_l(i) = max(0, n+1-2i)/(n+1) * eps

        which dominate the difference between the centered equally spaced profiles of
        diameters L and L + s for every 0 <= s <= 2 eps (n-1)/(n+1)."""
        width = exact(eps)
        if width < 0:
            raise DomainError("eps must be non-negative")
        e_r = [Fraction(max(0, 2 * i - n - 1), n + 1) * width for i in range(1, n + 1)]
        e_l = [Fraction(max(0, n + 1 - 2 * i), n + 1) * width for i in range(1, n + 1)]
        return cls(e_l, e_r, ctx)

    @property
    def n(self) -> int:
        return len(self.e_l)

    def left(self, i: int) -> BoundScalar:
        """e_l(i), 1-based."""
        return self.e_l[i - 1]

    def right(self, i: int) -> BoundScalar:
        """e_r(i), 1-based."""
        return self.e_r[i - 1]

    def extremes(self) -> Tuple[BoundScalar, BoundScalar]:
        """(e_l(1), e_r(n))."""
        return self.e_l[0], self.e_r[-1]

    def max_entry(self) -> Fraction:
        ctx = self.ctx
        return max(ctx.hi(value) for value in itertools.chain(self.e_l, self.e_r))

    def widened(
        self, i: int, left: ScalarLike = 0, right: ScalarLike = 0
    ) -> "DeviationEnvelope":
        """Copy with e_l(i) and e_r(i) (1-based) increased by the given amounts."""
        ctx = self.ctx
        e_l, e_r = self.e_l.copy(), self.e_r.copy()
        e_l[i - 1] = e_l[i - 1] + ctx.convert(left)
        e_r[i - 1] = e_r[i - 1] + ctx.convert(right)
        return DeviationEnvelope(e_l, e_r, ctx)

    def contains(self, base: Profile, other: Profile) -> bool:
        """Whether other(i) lies within [base(i) - e_l(i), base(i) + e_r(i)] for all
        agents, decided certainly."""
        ctx = self.ctx
        for value, candidate, left, right in zip(
            base.values, other.values, self.e_l, self.e_r
        ):
            if not ctx.certainly_le(value - left, candidate):
                return False
            if not ctx.certainly_le(candidate, value + right):
                return False
        return True

    def __repr__(self) -> str:
        return "DeviationEnvelope(n={}, max={})".format(
            self.n, float(self.max_entry())
        )


class ArrowSets:
    """Possible members (1-based) of the four arrow sets of every agent, and the
    certified minimum n_i of the neighbor count under perturbation."""

    def __init__(
        self,
        right_add: List[IndexList],
        right_remove: List[IndexList],
        left_add: List[IndexList],
        left_remove: List[IndexList],
        n_min: np.ndarray,
    ) -> None:
        self.right_add = right_add
        self.right_remove = right_remove
        self.left_add = left_add
        self.left_remove = left_remove
        self.n_min = n_min

    def sets(self, i: int) -> Tuple[IndexList, IndexList, IndexList, IndexList]:
        """(right_add, right_remove, left_add, left_remove) of agent i (1-based)."""
        return (
            self.right_add[i - 1],
            self.right_remove[i - 1],
            self.left_add[i - 1],
            self.left_remove[i - 1],
        )

    def all_empty(self) -> bool:
        tables = (self.right_add, self.right_remove, self.left_add, self.left_remove)
        return not any(members for table in tables for members in table)


# one possible role of a block of agents: (in window, right flag, left flag); the
# right flag marks right-remove (in window) or right-add (out of window), the left
# flag left-remove (in window) or left-add (out of window)
State = Tuple[bool, bool, bool]


class _Unit(NamedTuple):
    start: int
    stop: int
    states: Tuple[State, ...]


class _Totals(NamedTuple):
    count_in: int
    sum_right: BoundScalar
    sum_left: BoundScalar


class _Relaxed(NamedTuple):
    max_average: BoundScalar
    min_average: BoundScalar
    kept_right: int
    kept_left: int
    added_right: int
    added_left: int
    n_min: int


def _outcomes(test: Trichotomy, accept: frozenset) -> Tuple[bool, ...]:
    if test is Trichotomy.UNKNOWN:
        return (False, True)
    return (test in accept,)


class _Propagator:
    """Per-step data shared by the agents: prefix sums, candidate search arrays and
    the blocks of agents with identical opinion and bounds."""

    def __init__(
        self, f: Profile, env: DeviationEnvelope, windows: Optional[NeighborhoodIndex]
    ) -> None:
        if env.n != f.n:
            raise DomainError(
                "envelope has {} agents, profile {}".format(env.n, f.n)
            )
        self.ctx = ctx = f.ctx
        self.n = f.n
        self.values = f.values
        self.e_l = env.e_l
        self.e_r = env.e_r
        self.windows = neighborhoods(f) if windows is None else windows
        self.one = ctx.one
        self.lowered = ctx.array(
            [value - left for value, left in zip(self.values, self.e_l)]
        )
        self.raised = ctx.array(
            [value + right for value, right in zip(self.values, self.e_r)]
        )
        self.sums_raised = ctx.prefix_sums(self.raised)
        self.sums_lowered = ctx.prefix_sums(self.lowered)
        self._block_bounds()
        self._candidate_bounds(f, env)

    def _same(self, a: int, b: int) -> bool:
        ctx = self.ctx
        return (
            ctx.identical(self.values[a], self.values[b])
            and ctx.identical(self.e_l[a], self.e_l[b])
            and ctx.identical(self.e_r[a], self.e_r[b])
        )

    def _block_bounds(self) -> None:
        starts = [0] + [j for j in range(1, self.n) if not self._same(j - 1, j)]
        self.block_starts = np.asarray(starts, dtype=np.int64)
        self.block_stops = np.asarray(starts[1:] + [self.n], dtype=np.int64)
        block_of = np.zeros(self.n, dtype=np.int64)
        block_of[self.block_starts[1:]] = 1
        self.block_of = np.cumsum(block_of)

    def _candidate_bounds(self, f: Profile, env: DeviationEnvelope) -> None:
        ctx = self.ctx
        v_lo, v_hi = f.float_bounds()
        el_hi = np.asarray([ctx.float_bounds(value)[1] for value in env.e_l])
        er_hi = np.asarray([ctx.float_bounds(value)[1] for value in env.e_r])
        lowered_lo = v_lo - el_hi
        raised_hi = v_hi + er_hi
        suffix_min = np.minimum.accumulate(lowered_lo[::-1])[::-1]
        prefix_max = np.maximum.accumulate(raised_hi)

        def slack(values: np.ndarray) -> np.ndarray:
            return settings.FLOAT_SLACK * (1.0 + np.abs(values))

        removal_right = v_hi - 1.0 + er_hi
        addition_right = v_hi + 1.0 + er_hi
        addition_left = v_lo - 1.0 - el_hi
        removal_left = v_lo + 1.0 - el_hi
        # agents j >= remove_right_stop are certainly not right-remove candidates
        self.remove_right_stop = np.searchsorted(
            suffix_min, removal_right + slack(removal_right), side="left"
        )
        self.add_right_stop = np.searchsorted(
            suffix_min, addition_right + slack(addition_right), side="right"
        )
        # agents j < add_left_start are certainly not left-add candidates
        self.add_left_start = np.searchsorted(
            prefix_max, addition_left - slack(addition_left), side="left"
        )
        self.remove_left_start = np.searchsorted(
            prefix_max, removal_left - slack(removal_left), side="left"
        )

    # zones ----------------------------------------------------------------------------
    def zones(
        self, i: int, skip_block: bool
    ) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """0-based half-open ranges left and right of agent i holding every agent
        whose role is not certainly 'kept in window'/'out of reach'."""
        windows = self.windows
        l_out, l_in = windows.outer_left[i] - 1, windows.left[i] - 1
        r_in, r_out = windows.right[i] - 1, windows.outer_right[i] - 1
        left_start = min(int(self.add_left_start[i]), l_out)
        left_stop = max(l_in, min(i, int(self.remove_right_stop[i])), l_out)
        left_stop = min(left_stop, i)
        right_start = min(max(i + 1, int(self.remove_left_start[i])), r_in + 1)
        right_stop = max(r_out + 1, int(self.add_right_stop[i]))
        right_start = max(right_start, i + 1)
        right_stop = min(max(right_stop, right_start), self.n)
        if skip_block:
            block = self.block_of[i]
            left_stop = min(left_stop, int(self.block_starts[block]))
            right_start = max(right_start, int(self.block_stops[block]))
            right_stop = max(right_stop, right_start)
        left_start = min(left_start, left_stop)
        return (left_start, left_stop), (right_start, right_stop)

    def _blocks_in(self, start: int, stop: int) -> Iterator[Tuple[int, int]]:
        position = start
        while position < stop:
            block = self.block_of[position]
            block_stop = min(int(self.block_stops[block]), stop)
            yield position, block_stop
            position = block_stop

    def units(self, i: int, skip_block: bool) -> Tuple[List[_Unit], Tuple[int, int]]:
        """Blocks of agents around i with their possible roles, and the 0-based
        inclusive certain window [l_in, r_in]."""
        ctx = self.ctx
        one = self.one
        value = self.values[i]
        removal_right = value - one + self.e_r[i]
        addition_right = value + one + self.e_r[i]
        addition_left = value - one - self.e_l[i]
        removal_left = value + one - self.e_l[i]
        (left_start, left_stop), (right_start, right_stop) = self.zones(i, skip_block)
        units: List[_Unit] = []
        for start, stop in self._blocks_in(left_start, left_stop):
            other = self.values[start]
            window = _outcomes(ctx.compare(value - other, one), _LESS_EQUAL)
            states: List[State] = []
            for inside in window:
                if inside:
                    test = ctx.compare(self.lowered[start], removal_right)
                    flags = _outcomes(test, _LESS)
                    states.extend((True, flag, False) for flag in flags)
                else:
                    test = ctx.compare(self.raised[start], addition_left)
                    states.extend(
                        (False, False, flag) for flag in _outcomes(test, _GREATER_EQUAL)
                    )
            units.append(_Unit(start, stop, tuple(states)))
        for start, stop in self._blocks_in(right_start, right_stop):
            other = self.values[start]
            window = _outcomes(ctx.compare(other - value, one), _LESS_EQUAL)
            states = []
            for inside in window:
                if inside:
                    test = ctx.compare(self.raised[start], removal_left)
                    flags = _outcomes(test, _GREATER)
                    states.extend((True, False, flag) for flag in flags)
                else:
                    test = ctx.compare(self.lowered[start], addition_right)
                    states.extend(
                        (False, flag, False) for flag in _outcomes(test, _LESS_EQUAL)
                    )
            units.append(_Unit(start, stop, tuple(states)))
        l_in = int(self.windows.left[i]) - 1
        r_in = int(self.windows.right[i]) - 1
        return units, (l_in, r_in)

    # totals ---------------------------------------------------------------------------
    def _base(self, units: List[_Unit], l_in: int, r_in: int) -> _Totals:
        """Totals of the certain window without the agents covered by units."""
        count = r_in - l_in + 1
        sum_right = self.sums_raised[r_in + 1] - self.sums_raised[l_in]
        sum_left = self.sums_lowered[r_in + 1] - self.sums_lowered[l_in]
        raised, lowered = self.sums_raised, self.sums_lowered
        for unit in units:
            start, stop = max(unit.start, l_in), min(unit.stop, r_in + 1)
            if start < stop:
                count -= stop - start
                sum_right = sum_right - (raised[stop] - raised[start])
                sum_left = sum_left - (lowered[stop] - lowered[start])
        return _Totals(count, sum_right, sum_left)

    def _extreme_average(
        self,
        total: BoundScalar,
        count: int,
        optional: List[Tuple[int, int]],
        values: np.ndarray,
        highest: bool,
    ) -> BoundScalar:
        """Largest (smallest) average of a window holding the certain members and
        any subset of the optional (start, size) blocks. The optimum takes the
        blocks with the most extreme endpoints first, so scanning the prefixes of
        the exactly sorted endpoints covers it."""
        ctx = self.ctx
        endpoint = ctx.upper if highest else ctx.lower
        key = ctx.hi if highest else ctx.lo
        extreme = ctx.max if highest else ctx.min
        best = total / count
        ordered = sorted(optional, key=lambda block: key(values[block[0]]))
        if highest:
            ordered.reverse()
        for start, size in ordered:
            total = total + endpoint(values[start]) * size
            count += size
            best = extreme(best, total / count)
        return best

    def relaxed(self, i: int, skip_block: bool) -> _Relaxed:
        """Worst case of every ingredient of agent i's bounds, each taken on its
        own. Undecided roles count toward inclusion in every arrow set they may
        belong to."""
        units, (l_in, r_in) = self.units(i, skip_block)
        base = self._base(units, l_in, r_in)
        kept_right = kept_left = n_min = base.count_in
        sum_right, sum_left = base.sum_right, base.sum_left
        added_right = added_left = 0
        open_right: List[Tuple[int, int]] = []
        open_left: List[Tuple[int, int]] = []
        for unit in units:
            size = unit.stop - unit.start
            keeps_right = [inside and not right for inside, right, _ in unit.states]
            keeps_left = [inside and not left for inside, _, left in unit.states]
            if all(keeps_right):
                kept_right += size
                sum_right = sum_right + self.raised[unit.start] * size
            elif any(keeps_right):
                open_right.append((unit.start, size))
            if all(keeps_left):
                kept_left += size
                sum_left = sum_left + self.lowered[unit.start] * size
            elif any(keeps_left):
                open_left.append((unit.start, size))
            if any(not inside and right for inside, right, _ in unit.states):
                added_right += size
            if any(not inside and left for inside, _, left in unit.states):
                added_left += size
            if all(keeps_right) and all(keeps_left):
                n_min += size
        return _Relaxed(
            self._extreme_average(
                sum_right, kept_right, open_right, self.raised, highest=True
            ),
            self._extreme_average(
                sum_left, kept_left, open_left, self.lowered, highest=False
            ),
            kept_right,
            kept_left,
            added_right,
            added_left,
            n_min,
        )

    def bounds(
        self, i: int, updated: BoundScalar, skip_block: bool
    ) -> Tuple[BoundScalar, BoundScalar]:
        """(e_l', e_r') of agent i as upper points, clamped at 0."""
        ctx = self.ctx
        worst = self.relaxed(i, skip_block)
        if worst.n_min <= 0:
            raise CertificationFailure(
                "agent {} may lose all neighbors (n_i = {}); envelope too wide"
                "".format(i + 1, worst.n_min)
            )
        ghost = ctx.convert(Fraction(2, worst.n_min))
        pull_right = ctx.convert(
            Fraction(2 * worst.added_right, worst.kept_right + worst.added_right)
        )
        pull_left = ctx.convert(
            Fraction(2 * worst.added_left, worst.kept_left + worst.added_left)
        )
        right = worst.max_average + pull_right - updated + ghost
        left = updated - worst.min_average + pull_left + ghost
        return (
            ctx.upper(ctx.max(ctx.zero, ctx.upper(left))),
            ctx.upper(ctx.max(ctx.zero, ctx.upper(right))),
        )

    def shareable(self, i: int) -> bool:
        """Whether members of i's block can never enter i's arrow sets, so that the
        whole block shares one bound."""
        return self.ctx.certainly_le(self.e_l[i] + self.e_r[i], self.one)


def ghost_bound(f: Profile, windows: Optional[NeighborhoodIndex] = None) -> np.ndarray:
    """2/#N_i(f) per agent: bound on |Uf(i) - B(Ug)(i)| for every k-regular refinement
    g of f. Ball mode uses the certain window, which can only make the bound larger."""
    ctx = f.ctx
    windows = neighborhoods(f) if windows is None else windows
    cache = {}
    bounds = np.empty(f.n, dtype=object)
    for index, size in enumerate(windows.sizes()):
        size = int(size)
        if size not in cache:
            cache[size] = ctx.convert(Fraction(2, size))
        bounds[index] = cache[size]
    if ctx.mode == "float":
        return bounds.astype(np.float64)
    return bounds


def arrow_sets(
    f: Profile, env: DeviationEnvelope, windows: Optional[NeighborhoodIndex] = None
) -> ArrowSets:
    """Possible members of the four arrow sets for every agent, by testing each
    candidate j against its own e_l(j)/e_r(j). Members whose membership is undecided
    in ball mode are listed as possible members."""
    propagator = _Propagator(f, env, windows)
    tables: Tuple[List[IndexList], ...] = ([], [], [], [])
    n_min = np.empty(f.n, dtype=np.int64)
    for i in range(f.n):
        units, _ = propagator.units(i, skip_block=False)
        right_add: IndexList = []
        right_remove: IndexList = []
        left_add: IndexList = []
        left_remove: IndexList = []
        for unit in units:
            members = list(range(unit.start + 1, unit.stop + 1))
            left_side = unit.stop <= i
            if left_side:
                if any(state[0] and state[1] for state in unit.states):
                    right_remove.extend(members)
                if any(not state[0] and state[2] for state in unit.states):
                    left_add.extend(members)
            else:
                if any(not state[0] and state[1] for state in unit.states):
                    right_add.extend(members)
                if any(state[0] and state[2] for state in unit.states):
                    left_remove.extend(members)
        found = (right_add, right_remove, left_add, left_remove)
        for table, members in zip(tables, found):
            table.append(members)
        n_min[i] = propagator.relaxed(i, skip_block=False).n_min
    return ArrowSets(*tables, n_min=n_min)


def propagate(
    f_t: Profile,
    f_next: Profile,
    env_t: DeviationEnvelope,
    windows: Optional[NeighborhoodIndex] = None,
) -> DeviationEnvelope:
    """Envelope at time t+1 from the envelope at time t.

    Parameters
    ----------
    f_t:
        base profile U^t f
    f_next:
        its update U^{t+1} f
    env_t:
        envelope sound for `f_t`
    windows:
        neighborhoods of `f_t`, if already computed

    Returns
    -------
        envelope sound for `f_next`; entries are upper endpoints, clamped at 0

    Raises
    ------
    CertificationFailure
        if some agent may lose all neighbors
    """
    if f_next.n != f_t.n:
        raise DomainError("profiles of different size")
    propagator = _Propagator(f_t, env_t, windows)
    ctx = f_t.ctx
    e_l = np.empty(f_t.n, dtype=object)
    e_r = np.empty(f_t.n, dtype=object)
    shared = 0
    for block in range(len(propagator.block_starts)):
        start = int(propagator.block_starts[block])
        stop = int(propagator.block_stops[block])
        if propagator.shareable(start) and all(
            ctx.identical(f_next.values[j], f_next.values[start])
            for j in range(start + 1, stop)
        ):
            updated = f_next.values[start]
            left, right = propagator.bounds(start, updated, skip_block=True)
            e_l[start:stop] = [left] * (stop - start)
            e_r[start:stop] = [right] * (stop - start)
            shared += stop - start - 1
            continue
        for i in range(start, stop):
            e_l[i], e_r[i] = propagator.bounds(i, f_next.values[i], skip_block=False)
    LOGGER.debug(
        "propagated envelope over %d agents in %d blocks (%d shared)",
        f_t.n,
        len(propagator.block_starts),
        shared,
    )
    return DeviationEnvelope(e_l, e_r, ctx)


def envelope_evolve(
    f0: Profile,
    env0: DeviationEnvelope,
    T: int,
    stop_when: StopCriterion = None,
    show_progress: bool = False,
) -> EnvelopeTrace:
    """Alternate update and propagate for up to `T` steps.

    Parameters
    ----------
    f0:
        initial base profile
    env0:
        envelope sound for `f0`
    T:
        number of steps
    stop_when:
        optional predicate (t, U^t f, envelope) evaluated on every recorded state;
        the evolution stops at the first state where it returns True

    Raises
    ------
    CertificationFailure
        propagated from `propagate`
    """
    if T < 0:
        raise DomainError("number of steps must be non-negative, got {}".format(T))
    profiles, envelopes = [f0], [env0]
    if stop_when is not None and stop_when(0, f0, env0):
        return EnvelopeTrace(profiles, envelopes)
    steps = progress(
        range(T),
        desc="envelopes",
        total=T,
        disable=None if not show_progress else False,
    )
    for t in steps:
        current, envelope = profiles[-1], envelopes[-1]
        windows = neighborhoods(current)
        following = update(current, windows)
        envelope = propagate(current, following, envelope, windows)
        profiles.append(following)
        envelopes.append(envelope)
        el1, ern = envelope.extremes()
        LOGGER.debug(
            "step %d: e_l(1) <= %.6g, e_r(n) <= %.6g",
            t + 1,
            envelope.ctx.hi_float(el1),
            envelope.ctx.hi_float(ern),
        )
        if stop_when is not None and stop_when(t + 1, following, envelope):
            break
    return EnvelopeTrace(profiles, envelopes)
