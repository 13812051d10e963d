# test_update.py
# meant to be run with 'pytest'
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

import logging

from fractions import Fraction

import numpy as np
import pytest

from hkverify.core.errors import DomainError
from hkverify.core.profile import (
    clusters,
    equally_spaced,
    from_values,
    is_symmetric,
    translate,
)
from hkverify.core.update import evolve, is_frozen, neighborhoods, update, update_naive

FRAGMENTING = ["0", "0", "1", "2", "3", "3"]
FRAGMENTED = [
    Fraction(1, 3),
    Fraction(1, 3),
    Fraction(3, 4),
    Fraction(9, 4),
    Fraction(8, 3),
    Fraction(8, 3),
]


def random_rational(rng, n, width=4):
    denominator = int(rng.integers(1, 9))
    numerators = np.sort(rng.integers(0, width * denominator + 1, size=n))
    return from_values([Fraction(int(p), denominator) for p in numerators], "rational")


def random_symmetric(rng, n):
    half = random_rational(rng, n // 2).as_fractions()
    middle = [Fraction(5)] if n % 2 else []
    upper = [10 - x for x in reversed(half)]
    return from_values(half + middle + upper, "rational")


class TestNeighborhoods:
    def test_windows(self):
        windows = neighborhoods(from_values(FRAGMENTING, mode="rational"))
        assert [windows.window(i) for i in range(1, 7)] == [
            (1, 3),
            (1, 3),
            (1, 4),
            (3, 6),
            (4, 6),
            (4, 6),
        ]

    def test_constant_profile(self):
        windows = neighborhoods(from_values([2] * 5, mode="rational"))
        assert all(windows.window(i) == (1, 5) for i in range(1, 6))

    def test_isolated_agents(self):
        windows = neighborhoods(from_values([0, 2], mode="rational"))
        assert [windows.window(1), windows.window(2)] == [(1, 1), (2, 2)]

    def test_ball_windows_bracket_exact(self):
        f = from_values(FRAGMENTING, mode="ball")
        windows = neighborhoods(f)
        for i in range(1, 7):
            inner, outer = windows.window(i), windows.outer_window(i)
            assert outer[0] <= inner[0] <= i <= inner[1] <= outer[1]

    def test_float_matches_rational(self):
        # dyadic opinions are exact in float64
        numerators = np.sort(np.random.default_rng(8).integers(0, 33, size=50))
        f = from_values([Fraction(int(p), 8) for p in numerators], "rational")
        exact_windows = neighborhoods(f)
        float_windows = neighborhoods(f.with_context("float"))
        assert np.array_equal(exact_windows.left, float_windows.left)
        assert np.array_equal(exact_windows.right, float_windows.right)


class TestUpdate:
    def test_fragmentation(self):
        f = from_values(FRAGMENTING, mode="rational")
        for result in (update(f), update_naive(f)):
            assert result.as_fractions() == FRAGMENTED
            decomposition = clusters(result)
            assert decomposition.separations[1] == Fraction(3, 2)

    def test_constant_profile_is_fixed(self):
        f = from_values(["7/3"] * 4, mode="rational")
        assert update(f).equals(f)
        assert update_naive(f).equals(f)

    def test_no_interaction(self):
        f = from_values([0, 2], mode="rational")
        assert update(f).equals(f)

    def test_fast_equals_naive(self):
        rng = np.random.default_rng(7)
        for _ in range(150):
            f = random_rational(rng, int(rng.integers(1, 81)))
            assert update(f).equals(update_naive(f))

    @pytest.mark.slow
    def test_fast_equals_naive_at_scale(self):
        rng = np.random.default_rng(71)
        for _ in range(1000):
            n = int(rng.integers(1, 201))
            f = random_rational(rng, n, width=int(rng.integers(1, 25)))
            assert update(f).equals(update_naive(f))

    def test_order_preserved(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            values = update(random_rational(rng, 40)).as_fractions()
            assert values == sorted(values)

    def test_translation_invariance(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            f = random_rational(rng, 30)
            shift = Fraction(int(rng.integers(-50, 50)), int(rng.integers(1, 9)))
            shifted = update(translate(f, shift)).as_fractions()
            assert shifted == [x + shift for x in update(f).as_fractions()]

    def test_symmetry_preserved(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            f = random_symmetric(rng, int(rng.integers(2, 40)))
            assert is_symmetric(f) == (True, 10)
            assert is_symmetric(update(f)) == (True, 10)

    def test_ball_encloses_exact(self):
        rng = np.random.default_rng(29)
        for _ in range(30):
            f = random_rational(rng, 60)
            exact_next = update(f).as_fractions()
            ball_next = update(f.with_context("ball", 80))
            for value, (low, high) in zip(exact_next, ball_next.endpoints()):
                assert low <= value <= high

    def test_ball_naive_encloses_exact(self):
        f = from_values(FRAGMENTING, mode="ball")
        for value, (low, high) in zip(FRAGMENTED, update_naive(f).endpoints()):
            assert low <= value <= high

    def test_float_close_to_exact(self):
        f = from_values(FRAGMENTING, mode="float")
        assert np.allclose(update(f).values, [float(x) for x in FRAGMENTED])

    def test_structural_collapse(self):
        f = equally_spaced(9, "1/2", mode="ball")
        following = update(f)
        assert following.values[0] is following.values[-1]
        assert clusters(following).is_consensus


class TestEvolve:
    def test_small_diameter_freezes_after_one_step(self):
        for mode in ("rational", "ball"):
            trajectory = evolve(equally_spaced(21, "0.9", mode=mode))
            assert trajectory.frozen_at == 1
            assert clusters(trajectory.final).is_consensus

    def test_isolated_agents_frozen_at_start(self):
        trajectory = evolve(from_values([0, 2], mode="rational"))
        assert trajectory.frozen_at == 0
        assert trajectory.T == 0

    def test_fixed_number_of_steps(self):
        trajectory = evolve(from_values(FRAGMENTING, mode="rational"), T=1)
        assert trajectory.T == 1
        assert trajectory[1].as_fractions() == FRAGMENTED
        assert trajectory.frozen_at is None

    def test_states_follow_update(self):
        trajectory = evolve(equally_spaced(15, 3, mode="rational"))
        for before, after in zip(trajectory.states[:-1], trajectory.states[1:]):
            assert update(before).equals(after)
        assert update(trajectory.final).equals(trajectory.final)

    def test_diameter_non_increasing(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            trajectory = evolve(random_rational(rng, 30, width=8))
            diameters = trajectory.diameters()
            assert all(b <= a for a, b in zip(diameters[:-1], diameters[1:]))

    def test_random_profiles_freeze(self):
        rng = np.random.default_rng(37)
        for _ in range(10):
            f = random_rational(rng, int(rng.integers(1, 51)), width=6)
            trajectory = evolve(f, freeze_cap=10000)
            assert trajectory.frozen_at is not None
            assert is_frozen(trajectory.final)
            assert clusters(trajectory.final).frozen

    def test_freeze_cap_is_reported(self, caplog):
        f = equally_spaced(41, 4, mode="float")
        with caplog.at_level(logging.INFO, logger="hkverify.core.update"):
            trajectory = evolve(f, freeze_cap=1)
        assert trajectory.capped
        assert trajectory.T == 1
        assert "freeze cap" in caplog.text

    def test_stats(self):
        trajectory = evolve(from_values(FRAGMENTING, mode="rational"), T=1)
        first, second = trajectory.stats
        assert first.diameter == 3
        assert first.cluster_count == 4
        assert second.cluster_count == 4
        assert second.minimum == Fraction(1, 3)
        assert trajectory.stats_rows()[1][:4] == ["1", "7/3", "7/3", "4"]

    def test_ball_evolution_freezes_structurally(self):
        trajectory = evolve(equally_spaced(101, 3, mode="ball"))
        assert trajectory.frozen_at is not None
        final = trajectory.final
        assert is_frozen(final)
        assert clusters(final).is_consensus

    def test_negative_steps(self):
        with pytest.raises(DomainError):
            evolve(from_values([0, 1], mode="rational"), T=-1)
