# update.py
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
The Hegselmann-Krause update operator on sorted profiles,

    Uf(i) = average of f(j) over N_i(f) = {j : |f(j) - f(i)| <= 1},

with an O(n) two-pointer/prefix-sum implementation, a literal O(n^2) oracle,
freezing detection and trajectory generation.
"""

import itertools
import logging
import warnings

from typing import List, Optional, Tuple

import numpy as np

import hkverify.settings as settings

from hkverify.core.errors import DomainError
from hkverify.core.numerics import ArithmeticContext, Trichotomy
from hkverify.core.profile import Profile, diameter, runs
from hkverify.core.storage import Trajectory
from hkverify.utils.misc import progress
from hkverify.utils.typedefs import BoundScalar

LOGGER = logging.getLogger(__name__)

# naive oracle: enumerate undecided memberships up to this many agents
NAIVE_MAX_UNDECIDED = 6


class NeighborhoodIndex:
    """Per-agent neighborhood windows of a sorted profile, as 1-based inclusive index
    ranges.

    In exact and float mode every window is decided and the inner and outer windows
    coincide. In ball mode `left`/`right` delimit the agents certainly within
    distance 1 (certain-inner window) and `outer_left`/`outer_right` the agents
    possibly within distance 1 (possible-outer window); the exact window of the
    enclosed profile lies between the two.
    """

    def __init__(
        self,
        left: np.ndarray,
        right: np.ndarray,
        outer_left: Optional[np.ndarray] = None,
        outer_right: Optional[np.ndarray] = None,
    ) -> None:
        self.left = left
        self.right = right
        self.outer_left = left if outer_left is None else outer_left
        self.outer_right = right if outer_right is None else outer_right

    @property
    def n(self) -> int:
        return len(self.left)

    @property
    def is_exact(self) -> bool:
        return bool(
            np.array_equal(self.left, self.outer_left)
            and np.array_equal(self.right, self.outer_right)
        )

    def window(self, i: int) -> Tuple[int, int]:
        """Certain window (left_i, right_i) of agent `i` (1-based)."""
        return int(self.left[i - 1]), int(self.right[i - 1])

    def outer_window(self, i: int) -> Tuple[int, int]:
        return int(self.outer_left[i - 1]), int(self.outer_right[i - 1])

    def sizes(self) -> np.ndarray:
        """#N_i of the certain window."""
        return self.right - self.left + 1

    def outer_sizes(self) -> np.ndarray:
        return self.outer_right - self.outer_left + 1

    def key(self, index: int) -> Tuple[int, int, int, int]:
        """Window key of the agent at 0-based position `index`."""
        return (
            int(self.outer_left[index]),
            int(self.left[index]),
            int(self.right[index]),
            int(self.outer_right[index]),
        )

    def undecided_count(self) -> int:
        """Number of agents whose window is not fully decided."""
        return int(
            np.count_nonzero(
                (self.left != self.outer_left) | (self.right != self.outer_right)
            )
        )

    def __repr__(self) -> str:
        return "NeighborhoodIndex(n={}, exact={})".format(self.n, self.is_exact)


def _float_neighborhoods(values: np.ndarray) -> NeighborhoodIndex:
    left = np.searchsorted(values, values - 1.0, side="left") + 1
    right = np.searchsorted(values, values + 1.0, side="right")
    return NeighborhoodIndex(left.astype(np.int64), right.astype(np.int64))


def neighborhoods(f: Profile) -> NeighborhoodIndex:
    """Neighborhood windows of every agent, by two monotone pointers.

    The windows are contiguous since `f` is sorted, and their end points are
    non-decreasing in i, so all four pointers only move forward.
    """
    ctx = f.ctx
    values = f.values
    n = f.n
    if ctx.mode == "float":
        return _float_neighborhoods(np.asarray(values, dtype=np.float64))

    one = ctx.one
    left_in = np.empty(n, dtype=np.int64)
    left_out = np.empty(n, dtype=np.int64)
    right_in = np.empty(n, dtype=np.int64)
    right_out = np.empty(n, dtype=np.int64)
    l_in = l_out = r_in = r_out = 0
    for i in range(n):
        value = values[i]
        while l_in < i and not ctx.certainly_le(value - values[l_in], one):
            l_in += 1
        while l_out < i and ctx.certainly_greater(value - values[l_out], one):
            l_out += 1
        r_in = max(r_in, i)
        r_out = max(r_out, i)
        while r_in + 1 < n and ctx.certainly_le(values[r_in + 1] - value, one):
            r_in += 1
        while r_out + 1 < n and not ctx.certainly_greater(
            values[r_out + 1] - value, one
        ):
            r_out += 1
        left_in[i], left_out[i] = l_in + 1, l_out + 1
        right_in[i], right_out[i] = r_in + 1, r_out + 1
    windows = NeighborhoodIndex(left_in, right_in, left_out, right_out)
    if ctx.mode == "ball":
        LOGGER.debug(
            "windows of %d agents, %d undecided", n, windows.undecided_count()
        )
    return windows


def _window_average(
    ctx: ArithmeticContext,
    values: np.ndarray,
    sums: np.ndarray,
    key: Tuple[int, int, int, int],
) -> BoundScalar:
    """Average over the window(s) described by `key` (1-based, inclusive); covers
    every resolution of undecided boundary agents."""
    l_out, l_in, r_in, r_out = key
    if l_out == l_in and r_in == r_out:
        return (sums[r_in] - sums[l_in - 1]) / (r_in - l_in + 1)
    resolutions = (l_in - l_out + 1) * (r_out - r_in + 1)
    if resolutions > settings.MAX_WINDOW_RESOLUTIONS:
        # any average over a window inside [l_out, r_out] lies between its extremes
        return ctx.convert((ctx.lower(values[l_out - 1]), ctx.upper(values[r_out - 1])))
    averages = [
        (sums[right] - sums[left - 1]) / (right - left + 1)
        for left in range(l_out, l_in + 1)
        for right in range(r_in, r_out + 1)
    ]
    return ctx.hull(averages)


def _tighten_monotone(ctx: ArithmeticContext, updated: np.ndarray) -> np.ndarray:
    """Intersect every enclosure with the order constraint Uf(i-1) <= Uf(i) <= Uf(i+1)
    satisfied by the exact updated profile. Runs of shared objects stay shared."""
    n = len(updated)
    starts = [0] + [i for i in range(1, n) if updated[i] is not updated[i - 1]]
    run_values = [updated[start] for start in starts]
    for j in range(1, len(run_values)):
        previous, current = run_values[j - 1], run_values[j]
        if ctx.certainly_less(ctx.lower(current), ctx.lower(previous)):
            run_values[j] = ctx.convert((ctx.lower(previous), ctx.upper(current)))
    for j in range(len(run_values) - 2, -1, -1):
        following, current = run_values[j + 1], run_values[j]
        if ctx.certainly_greater(ctx.upper(current), ctx.upper(following)):
            run_values[j] = ctx.convert((ctx.lower(current), ctx.upper(following)))
    tightened = np.empty(n, dtype=object)
    stops = starts[1:] + [n]
    for start, stop, value in zip(starts, stops, run_values):
        tightened[start:stop] = [value] * (stop - start)
    return tightened


def update(f: Profile, windows: Optional[NeighborhoodIndex] = None) -> Profile:
    """One synchronous update Uf, via prefix sums over the neighborhood windows.

    Consecutive agents with the same window receive one shared output scalar, so
    clusters remain representable in ball mode (structural collapse).
    """
    ctx = f.ctx
    windows = neighborhoods(f) if windows is None else windows
    values = f.values
    n = f.n
    if ctx.mode == "float":
        sums = ctx.prefix_sums(values)
        updated = (sums[windows.right] - sums[windows.left - 1]) / windows.sizes()
        return Profile.from_array(updated, ctx, center=f.center)

    sums = ctx.prefix_sums(values)
    updated = np.empty(n, dtype=object)
    previous_key = None
    shared = None
    distinct = 0
    for index in range(n):
        key = windows.key(index)
        if key != previous_key:
            shared = _window_average(ctx, values, sums, key)
            previous_key = key
            distinct += 1
        updated[index] = shared
    if ctx.mode == "ball":
        updated = _tighten_monotone(ctx, updated)
    else:
        ctx.check(updated)
    LOGGER.debug("update of %d agents: %d distinct windows", n, distinct)
    return Profile.from_array(updated, ctx, center=f.center)


def update_naive(f: Profile) -> Profile:
    """Literal O(n^2) transcription of the update rule; reference oracle for
    `update`.

    In ball mode agents whose membership cannot be decided are enumerated (up to a
    small count) or covered by the hull of all possible neighbors.
    """
    ctx = f.ctx
    values = list(f.values)
    one = ctx.one
    updated = []
    for value in values:
        certain, undecided = [], []
        for other in values:
            distance = ctx.sub(ctx.max(value, other), ctx.min(value, other))
            test = ctx.compare(distance, one)
            if test is Trichotomy.CERTAINLY_GREATER:
                continue
            if test is Trichotomy.UNKNOWN:
                undecided.append(other)
            else:
                certain.append(other)
        if not undecided:
            updated.append(ctx.fsum(certain) / len(certain))
        elif len(undecided) <= NAIVE_MAX_UNDECIDED:
            averages = []
            for mask in itertools.product((False, True), repeat=len(undecided)):
                members = certain + [x for x, keep in zip(undecided, mask) if keep]
                averages.append(ctx.fsum(members) / len(members))
            updated.append(ctx.hull(averages))
        else:
            updated.append(ctx.hull(certain + undecided))
    return Profile.from_array(ctx.array(updated), ctx, center=f.center)


def is_frozen(f: Profile, windows: Optional[NeighborhoodIndex] = None) -> bool:
    """Whether `f` is a fixed point of the update.

    Exact mode compares Uf with f. Ball and float mode use the structural test:
    every cluster's possible window is the cluster itself.
    """
    if f.mode == "rational":
        return update(f, windows).equals(f)
    windows = neighborhoods(f) if windows is None else windows
    return _structurally_frozen(f, windows)


def _structurally_frozen(f: Profile, windows: NeighborhoodIndex) -> bool:
    for start, stop in runs(f):
        if windows.outer_left[start] != start + 1 or windows.outer_right[start] != stop:
            return False
        if windows.outer_left[stop - 1] != start + 1:
            return False
        if windows.outer_right[stop - 1] != stop:
            return False
    return True


def _diameter_increased(before: Profile, after: Profile) -> bool:
    ctx = before.ctx
    return ctx.certainly_greater(diameter(after), diameter(before))


def evolve(
    f: Profile,
    T: Optional[int] = None,
    freeze_cap: Optional[int] = None,
    show_progress: bool = False,
) -> Trajectory:
    """Iterate the update from `f`.

    Parameters
    ----------
    f:
        initial profile
    T:
        number of steps; None runs until freezing
    freeze_cap:
        upper limit on the number of steps; default: `settings.FREEZE_CAP`. Reaching
        it without freezing is recorded in the trajectory, not raised.
    show_progress:
        display a tqdm bar even outside IPython

    Returns
    -------
        Trajectory with states t = 0..T' where T' <= T is the freezing time if the
        evolution froze earlier
    """
    if T is not None and T < 0:
        raise DomainError("number of steps must be non-negative, got {}".format(T))
    cap = settings.FREEZE_CAP if freeze_cap is None else freeze_cap
    limit = cap if T is None else min(T, cap)
    states: List[Profile] = [f]
    frozen_at = None
    current = f
    steps = progress(
        range(limit + 1),
        desc="evolve",
        total=limit + 1,
        disable=None if not show_progress else False,
    )
    for t in steps:
        windows = neighborhoods(current)
        following = None
        if current.mode == "rational":
            following = update(current, windows)
            if following.equals(current):
                frozen_at = t
                break
        elif _structurally_frozen(current, windows):
            frozen_at = t
            break
        if t == limit:
            break
        if following is None:
            following = update(current, windows)
        if _diameter_increased(current, following):
            warnings.warn(
                "diameter increased at step {}; enclosures are inconsistent".format(
                    t + 1
                ),
                Warning,
            )
        states.append(following)
        current = following
    capped = frozen_at is None and (T is None or T > cap) and len(states) - 1 == cap
    if capped:
        LOGGER.info("evolution reached the freeze cap of %d steps", cap)
    else:
        LOGGER.debug(
            "evolved %d steps, frozen_at=%s", len(states) - 1, frozen_at
        )
    return Trajectory(states, frozen_at=frozen_at, capped=capped)
