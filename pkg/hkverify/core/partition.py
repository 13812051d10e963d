# partition.py
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
Good partitions of a symmetric profile into adjacent intervals A, B, C, D, E on the
left half (mirrored on the right), with E central. C holds the agents between A and
E that see agent 1 and the last agent of E; B and D are the leftovers on either
side of C. A and E are out of sight of one another.

With an envelope, visibility is padded by the deviation bounds, so that the
partition remains valid for every profile inside the envelope.
"""

import logging

from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

import hkverify.settings as settings

from hkverify.core.deviation import DeviationEnvelope
from hkverify.core.errors import DomainError
from hkverify.core.profile import Profile, diameter, is_symmetric, runs
from hkverify.utils.typedefs import IndexInterval

LOGGER = logging.getLogger(__name__)

# backward steps tried when the float estimate of max A is too optimistic
_A_RETRIES = 64

NAMES = ("A", "B", "C", "D", "E")


class GoodPartition:
    """Adjacent 1-based inclusive intervals A, B, C, D, E with 1 in A and E
    symmetric about the midpoint; n = 2(|A|+|B|+|C|+|D|) + |E|.

    Parameters
    ----------
    n:
        number of agents
    a, b, c, d:
        last index of A, B, C, D; empty sets repeat the previous last index
    """

    def __init__(self, n: int, a: int, b: int, c: int, d: int) -> None:
        if not 1 <= a <= b <= c <= d < (n + 1) // 2:
            raise DomainError(
                "invalid partition boundaries {} for n={}".format((a, b, c, d), n)
            )
        self.n = n
        self.bounds = (a, b, c, d)

    @property
    def intervals(self) -> Dict[str, IndexInterval]:
        a, b, c, d = self.bounds
        return {
            "A": (1, a),
            "B": (a + 1, b),
            "C": (b + 1, c),
            "D": (c + 1, d),
            "E": (d + 1, self.n - d),
        }

    @property
    def a(self) -> IndexInterval:
        return self.intervals["A"]

    @property
    def b(self) -> IndexInterval:
        return self.intervals["B"]

    @property
    def c(self) -> IndexInterval:
        return self.intervals["C"]

    @property
    def d(self) -> IndexInterval:
        return self.intervals["D"]

    @property
    def e(self) -> IndexInterval:
        return self.intervals["E"]

    @property
    def sizes(self) -> Tuple[int, int, int, int, int]:
        return tuple(last - first + 1 for first, last in self.intervals.values())

    def as_dict(self) -> Dict[str, List[int]]:
        record = {name: list(interval) for name, interval in self.intervals.items()}
        record["sizes"] = list(self.sizes)
        return record

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GoodPartition)
            and self.n == other.n
            and self.bounds == other.bounds
        )

    def __repr__(self) -> str:
        return "GoodPartition(n={}, sizes={})".format(self.n, self.sizes)


def _slack(value: float) -> float:
    return settings.FLOAT_SLACK * (1.0 + abs(value))


def _envelope(f: Profile, envelope: Optional[DeviationEnvelope]) -> DeviationEnvelope:
    if envelope is None:
        return DeviationEnvelope.zeros(f.n, f.ctx)
    if envelope.n != f.n:
        raise DomainError("envelope and profile sizes differ")
    return envelope


def _check_applicable(f: Profile, known_symmetric: bool) -> None:
    ctx = f.ctx
    if not ctx.certified:
        raise DomainError("good partitions need rational or ball arithmetic")
    if f.n < 3 or f.n % 2 == 0:
        raise DomainError("good partitions need an odd number n >= 3 of agents")
    if not known_symmetric and not is_symmetric(f)[0]:
        raise DomainError("good partitions need a symmetric profile")
    if ctx.certainly_greater(diameter(f), ctx.convert(4)):
        raise DomainError("good partitions need diameter <= 4")


class _Padded:
    """Envelope-padded opinions lower = f - e_l, upper = f + e_r, with float
    estimates for locating candidates."""

    def __init__(self, f: Profile, envelope: DeviationEnvelope) -> None:
        ctx = f.ctx
        self.ctx = ctx
        self.f = f
        self.lower = [value - left for value, left in zip(f.values, envelope.e_l)]
        self.upper = [value + right for value, right in zip(f.values, envelope.e_r)]
        self.lower_lo = np.asarray([ctx.lo_float(value) for value in self.lower])
        self.lower_hi = np.asarray([ctx.hi_float(value) for value in self.lower])
        self.upper_lo = np.asarray([ctx.lo_float(value) for value in self.upper])
        self.upper_hi = np.asarray([ctx.hi_float(value) for value in self.upper])
        self.upper_prefix_max = np.maximum.accumulate(self.upper_hi)
        self.reach_first = self.lower[0] + ctx.one
        reach = ctx.hi_float(self.reach_first)
        self.maybe_sees_first = self.upper_lo <= reach + _slack(reach)
        self._sees_first = {}

    def candidates(self, start: int, stop: int, last_e: int) -> np.ndarray:
        """1-based agents in [start, stop) that possibly see agent 1 and agent
        last_e, by float estimates."""
        if stop <= start:
            return np.zeros(0, dtype=np.int64)
        reach = float(self.upper_lo[last_e - 1]) - 1.0
        window = slice(start - 1, stop - 1)
        mask = self.maybe_sees_first[window] & (
            self.lower_hi[window] >= reach - _slack(reach)
        )
        return np.flatnonzero(mask) + start

    def out_of_sight(self, last_a: int, first_e: int) -> bool:
        """upper(max A) < lower(min E) - 1 certainly; 1-based."""
        ctx = self.ctx
        return ctx.certainly_less(
            self.upper[last_a - 1] + ctx.one, self.lower[first_e - 1]
        )

    def sees_first(self, i: int) -> bool:
        if i not in self._sees_first:
            self._sees_first[i] = self.ctx.certainly_le(
                self.upper[i - 1], self.reach_first
            )
        return self._sees_first[i]

    def sees(self, i: int, last_e: int) -> bool:
        """Agent i sees agent 1 and the last agent of E, padded."""
        ctx = self.ctx
        return self.sees_first(i) and ctx.certainly_ge(
            self.lower[i - 1], self.upper[last_e - 1] - ctx.one
        )

    def last_a(self, first_e: int) -> Optional[int]:
        """Largest a < min E with A = {1..a} out of sight of E, if any."""
        threshold = float(self.lower_lo[first_e - 1]) - 1.0
        threshold -= _slack(threshold)
        estimate = int(
            np.searchsorted(
                self.upper_prefix_max[: first_e - 1], threshold, side="left"
            )
        )
        candidate = min(max(estimate, 1), first_e - 1)
        for a in range(candidate, max(candidate - _A_RETRIES, 0), -1):
            if self.out_of_sight(a, first_e):
                return a
        return None


def _e_candidates(f: Profile) -> Iterator[int]:
    """First index (1-based) of symmetric central blocks made of whole runs, from
    the innermost outward."""
    middle = (f.n + 1) // 2
    starts = [start + 1 for start, _ in runs(f) if start + 1 <= middle]
    starts.reverse()
    count = 0
    for first_e in starts:
        if first_e <= 1:
            return
        count += 1
        if count > settings.PARTITION_MAX_E_CANDIDATES:
            LOGGER.info(
                "stopped the partition scan after %d central blocks",
                settings.PARTITION_MAX_E_CANDIDATES,
            )
            return
        yield first_e


def _partition_for(padded: _Padded, first_e: int) -> Optional[GoodPartition]:
    n = padded.f.n
    last_e = n + 1 - first_e
    a = padded.last_a(first_e)
    if a is None:
        return None
    members = [
        int(i)
        for i in padded.candidates(a + 1, first_e, last_e)
        if padded.sees(int(i), last_e)
    ]
    if not members:
        # C empty: everything between A and E goes to B
        return GoodPartition(n, a, first_e - 1, first_e - 1, first_e - 1)
    first_c, last_c = members[0], members[-1]
    if last_c - first_c + 1 != len(members):
        LOGGER.debug("visibility set for E starting at %d is not an interval", first_e)
        return None
    return GoodPartition(n, a, first_c - 1, last_c, first_e - 1)


def candidate_partitions(
    f: Profile,
    envelope: Optional[DeviationEnvelope] = None,
    known_symmetric: bool = False,
) -> List[GoodPartition]:
    """All good partitions over the scanned central blocks E, ordered by decreasing
    |C| and, on ties, increasing |E|."""
    _check_applicable(f, known_symmetric)
    padded = _Padded(f, _envelope(f, envelope))
    found = []
    for first_e in _e_candidates(f):
        partition = _partition_for(padded, first_e)
        if partition is not None:
            found.append(partition)
    found.sort(key=lambda partition: (-partition.sizes[2], partition.sizes[4]))
    LOGGER.debug("found %d candidate partitions", len(found))
    return found


def find_good_partition(
    f: Profile,
    envelope: Optional[DeviationEnvelope] = None,
    known_symmetric: bool = False,
) -> Optional[GoodPartition]:
    """Good partition of `f` maximizing |C|, preferring the smaller E on ties.

    Parameters
    ----------
    f:
        symmetric profile on an odd number of agents with diameter at most 4
    envelope:
        deviation bounds used to pad visibility; default: none
    known_symmetric:
        skip the symmetry test (ball-mode profiles without a center tag)

    Returns
    -------
        the partition, or None when no central block is out of sight of a prefix,
        as in a consensus

    Raises
    ------
    DomainError
        for even n, asymmetric profiles, float arithmetic or diameter certainly
        above 4
    """
    found = candidate_partitions(f, envelope, known_symmetric)
    return found[0] if found else None


def verify_partition(
    f: Profile,
    partition: GoodPartition,
    envelope: Optional[DeviationEnvelope] = None,
) -> bool:
    """Re-check the partition against the profile agent by agent: adjacency, 1 in A,
    E symmetric and nonempty, A and E out of sight, C exactly the agents of B, C, D
    certainly seeing both A and E."""
    if partition.n != f.n:
        return False
    intervals = partition.intervals
    if intervals["A"][0] != 1:
        return False
    ordered = list(intervals.values())
    for (_, last), (first, _) in zip(ordered[:-1], ordered[1:]):
        if first != last + 1:
            return False
    first_e, last_e = intervals["E"]
    if last_e < first_e or first_e + last_e != f.n + 1:
        return False
    padded = _Padded(f, _envelope(f, envelope))
    if not padded.out_of_sight(intervals["A"][1], first_e):
        return False
    first_c, last_c = intervals["C"]
    for i in range(intervals["B"][0], intervals["D"][1] + 1):
        # opinions are sorted, so seeing agent 1 and max E covers A and E
        if padded.sees(i, last_e) != (first_c <= i <= last_c):
            return False
    return True
