# closed_forms.py
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
Explicit formulas for the first two updates of the equally spaced profile
f(i) = (i-1)h, h = L/(n-1). Used as an independent oracle for the simulator.

With r = floor(1/h) agents i, j see each other iff |i - j| <= r, so

    Uf(i) = h/2 * c(i),   c(i) = max(1, i-r) + min(n, i+r) - 2.

c is a non-decreasing piecewise linear integer sequence with three pieces. The
second update averages c over the index window {j : |c(j) - c(i)| <= 2/h}, whose
ends follow by inverting each piece, and whose sum follows from the partial sums
S(m) = sum_{j<=m} c(j) in closed form.
"""

import math

from fractions import Fraction
from typing import List, Optional, Tuple

from hkverify.core.errors import DomainError
from hkverify.core.numerics import exact
from hkverify.utils.typedefs import ScalarLike

# (first index, last index, slope, intercept) of c(j) = slope*j + intercept
Piece = Tuple[int, int, int, int]


def _spacing(n: int, L: ScalarLike) -> Tuple[Fraction, int]:
    if n < 2:
        raise DomainError("closed forms need n >= 2, got {}".format(n))
    length = exact(L)
    if length < 0:
        raise DomainError("diameter L must be non-negative")
    if length == 0:
        return Fraction(0), n - 1
    return length / (n - 1), math.floor(Fraction(n - 1) / length)


def _pieces(n: int, r: int) -> List[Piece]:
    if r + 1 <= n - r:
        pieces = [
            (1, r + 1, 1, r - 1),
            (r + 2, n - r, 2, -2),
            (n - r + 1, n, 1, n - r - 2),
        ]
    else:
        # every agent in the middle piece sees both extremists
        pieces = [
            (1, n - r, 1, r - 1),
            (n - r + 1, r + 1, 0, n - 1),
            (r + 2, n, 1, n - r - 2),
        ]
    clipped = [
        (max(first, 1), min(last, n), slope, intercept)
        for first, last, slope, intercept in pieces
    ]
    return [piece for piece in clipped if piece[0] <= piece[1]]


def _c(n: int, r: int, j: int) -> int:
    return max(1, j - r) + min(n, j + r) - 2


def _first_at_least(pieces: List[Piece], threshold: Fraction) -> Optional[int]:
    for first, last, slope, intercept in pieces:
        if slope == 0:
            if intercept >= threshold:
                return first
            continue
        candidate = max(first, math.ceil((threshold - intercept) / slope))
        if candidate <= last:
            return candidate
    return None


def _last_at_most(pieces: List[Piece], threshold: Fraction) -> Optional[int]:
    for first, last, slope, intercept in reversed(pieces):
        if slope == 0:
            if intercept <= threshold:
                return last
            continue
        candidate = min(last, math.floor((threshold - intercept) / slope))
        if candidate >= first:
            return candidate
    return None


def _partial_sum(n: int, r: int, m: int) -> int:
    """S(m) = sum of c(j) for j = 1..m."""
    if m <= 0:
        return 0
    if m <= r + 1:
        lower = m
    else:
        lower = (r + 1) + (m - r) * (m - r + 1) // 2 - 1
    p = min(max(n - r, 0), m)
    upper = p * (p + 1) // 2 + p * r + (m - p) * n
    return lower + upper - 2 * m


def closed_form_update(n: int, L: ScalarLike, t: int, i: int) -> Fraction:
    """U^t f(i) for the equally spaced profile on `n` agents with diameter `L`,
    t in {1, 2}.

    Parameters
    ----------
    n:
        number of agents, n >= 2
    L:
        diameter of the initial profile (int, Fraction, or decimal literal)
    t:
        number of updates, 1 or 2
    i:
        agent index, 1..n

    Returns
    -------
        exact value of the updated opinion
    """
    if t not in (1, 2):
        raise DomainError("closed forms exist for t in {{1, 2}}, got t={}".format(t))
    if not 1 <= i <= n:
        raise DomainError("agent index {} outside 1..{}".format(i, n))
    h, r = _spacing(n, L)
    if h == 0:
        return Fraction(0)
    if t == 1:
        return h * _c(n, r, i) / 2
    pieces = _pieces(n, r)
    centre = _c(n, r, i)
    reach = 2 / h
    left = _first_at_least(pieces, centre - reach)
    right = _last_at_most(pieces, centre + reach)
    total = _partial_sum(n, r, right) - _partial_sum(n, r, left - 1)
    return h * Fraction(total, right - left + 1) / 2


def closed_form_profile(n: int, L: ScalarLike, t: int) -> List[Fraction]:
    """All n opinions of U^t f for t in {1, 2}."""
    return [closed_form_update(n, L, t, i) for i in range(1, n + 1)]
