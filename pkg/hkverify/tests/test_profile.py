# test_profile.py
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

from fractions import Fraction

import numpy as np
import pytest

from hkverify.core.errors import DomainError
from hkverify.core.profile import (
    Profile,
    clusters,
    coarsen,
    diameter,
    equally_spaced,
    from_values,
    is_symmetric,
    random_refinement,
    refine,
    refine_canonical,
    runs,
    translate,
    uniform_random,
)


def fractions(profile):
    return profile.as_fractions()


def random_rational(rng, n):
    denominator = int(rng.integers(1, 7))
    numerators = np.sort(rng.integers(-10, 11, size=n))
    return from_values([Fraction(int(p), denominator) for p in numerators], "rational")


class TestConstruction:
    def test_equally_spaced(self):
        assert fractions(equally_spaced(3, 2, mode="rational")) == [0, 1, 2]
        assert fractions(equally_spaced(5, 6, mode="rational")) == [
            0,
            Fraction(3, 2),
            3,
            Fraction(9, 2),
            6,
        ]

    def test_equally_spaced_offset(self):
        f = equally_spaced(5, 4, offset=-2, mode="rational")
        assert fractions(f) == [-2, -1, 0, 1, 2]
        assert f.center == 0

    def test_equally_spaced_needs_two_agents(self):
        with pytest.raises(DomainError):
            equally_spaced(1, 3, mode="rational")

    def test_unsorted_rejected(self):
        with pytest.raises(DomainError):
            Profile([0, 2, 1], mode="rational")

    def test_sorting_on_request(self):
        f = from_values(["2", "1/2", "0"], mode="rational", sort=True)
        assert fractions(f) == [0, Fraction(1, 2), 2]

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            Profile([], mode="rational")

    def test_opinion_is_one_based(self):
        f = from_values([0, 1, 3], mode="rational")
        assert f.opinion(1) == 0
        assert f.opinion(3) == 3
        with pytest.raises(DomainError):
            f.opinion(0)

    def test_read_only(self):
        f = from_values([0, 1], mode="rational")
        with pytest.raises(AttributeError):
            f.values = np.array([0, 0])

    def test_uniform_random_sorted(self):
        f = uniform_random(200, 3, np.random.default_rng(1), mode="float")
        assert f.n == 200
        assert np.all(np.diff(f.values) >= 0)
        assert 0.0 <= f.first() and f.last() <= 3.0

    def test_with_context(self):
        f = equally_spaced(4, 3, mode="rational")
        ball = f.with_context("ball", 64)
        assert ball.mode == "ball"
        for (low, high), value in zip(ball.endpoints(), fractions(f)):
            assert low <= value <= high
        assert ball.center == 3


class TestRefinement:
    def test_canonical_midpoint(self):
        f = from_values([0, 2], mode="rational")
        assert fractions(refine_canonical(f, 1)) == [0, 1, 2]

    def test_canonical_identity(self):
        f = from_values([0, 1, 3], mode="rational")
        assert refine_canonical(f, 0).equals(f)

    def test_canonical_progressions(self):
        f = from_values([0, 1, 3], mode="rational")
        assert fractions(refine_canonical(f, 2)) == [
            0,
            Fraction(1, 3),
            Fraction(2, 3),
            1,
            Fraction(5, 3),
            Fraction(7, 3),
            3,
        ]

    def test_coarsen_example(self):
        g = from_values(["0", "1/3", "2/3", "1", "5/3", "7/3", "3"], mode="rational")
        assert fractions(coarsen(g, 3, 2)) == [0, 1, 3]
        assert coarsen(g, 7, 0).equals(g)

    def test_coarsen_size_mismatch(self):
        g = from_values([0, 1, 2, 3], mode="rational")
        with pytest.raises(DomainError):
            coarsen(g, 3, 2)

    def test_coarsen_inverts_refinement(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            f = random_rational(rng, int(rng.integers(2, 101)))
            k = int(rng.integers(0, 21))
            assert coarsen(refine_canonical(f, k), f.n, k).equals(f)

    def test_equally_spaced_refinement_identity(self):
        for n, L, k in [(3, 2, 1), (5, 6, 3), (11, Fraction(7, 2), 4)]:
            refined = refine_canonical(equally_spaced(n, L, mode="rational"), k)
            expected = equally_spaced(n + (n - 1) * k, L, mode="rational")
            assert refined.equals(expected)

    def test_refinement_commutes_with_affine_maps(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            f = random_rational(rng, 8)
            scale, shift = Fraction(int(rng.integers(1, 5)), 3), Fraction(-2, 7)
            mapped = from_values([scale * x + shift for x in fractions(f)], "rational")
            k = int(rng.integers(1, 5))
            left = refine_canonical(mapped, k)
            right = [scale * x + shift for x in fractions(refine_canonical(f, k))]
            assert fractions(left) == right

    def test_general_refinement(self):
        f = from_values([0, 1, 3], mode="rational")
        g = refine(f, 1, [["1/4"], ["2"]])
        assert fractions(g) == [0, Fraction(1, 4), 1, 2, 3]
        with pytest.raises(DomainError):
            refine(f, 1, [["2"], ["2"]])
        with pytest.raises(DomainError):
            refine(f, 2, [["1/4"], ["2"]])

    def test_random_refinement_coarsens_back(self):
        f = from_values([0, 1, 3, 3, 4], mode="rational")
        g = random_refinement(f, 5, np.random.default_rng(0))
        assert g.n == 5 + 4 * 5
        assert coarsen(g, 5, 5).equals(f)


class TestQueries:
    def test_diameter(self):
        assert diameter(from_values([0, 1, 2], mode="rational")) == 2
        assert diameter(from_values([3, 3, 3], mode="rational")) == 0
        assert diameter(equally_spaced(17, "5/2", mode="rational")) == Fraction(5, 2)

    def test_symmetry(self):
        assert is_symmetric(from_values([0, 1, 2], mode="rational")) == (True, 2)
        assert is_symmetric(from_values([0, 1, 3], mode="rational"))[0] is False
        assert is_symmetric(equally_spaced(9, 5, mode="rational")) == (True, 5)

    def test_symmetry_ball_by_construction(self):
        f = equally_spaced(7, Fraction(10, 3), mode="ball")
        symmetric, center = is_symmetric(f)
        assert symmetric
        assert center == Fraction(10, 3)

    def test_translate(self):
        f = equally_spaced(3, 2, mode="rational")
        g = translate(f, "1/2")
        assert fractions(g) == [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)]
        assert g.center == 3

    def test_runs(self):
        f = from_values([0, 0, 1, 2, 2, 2], mode="rational")
        assert runs(f) == [(0, 2), (2, 3), (3, 6)]

    def test_clusters_frozen(self):
        decomposition = clusters(from_values(["0", "0", "2.5", "2.5"], "rational"))
        assert decomposition.sizes == [2, 2]
        assert decomposition.separations == [Fraction(5, 2)]
        assert decomposition.frozen
        assert decomposition.starts() == [1, 3]

    def test_clusters_consensus(self):
        decomposition = clusters(from_values([1, 1, 1], mode="rational"))
        assert decomposition.is_consensus
        assert decomposition.frozen

    def test_clusters_not_frozen(self):
        decomposition = clusters(from_values(["0", "0.5", "1"], mode="rational"))
        assert decomposition.count == 3
        assert decomposition.separations == [Fraction(1, 2), Fraction(1, 2)]
        assert not decomposition.frozen

    def test_rows(self):
        f = from_values(["0", "1/3"], mode="rational")
        assert f.rows() == [["1", "0", "0"], ["2", "1/3", "1/3"]]
        assert Profile.from_rows(f.rows(), "rational").equals(f)

    def test_rows_need_consecutive_indices(self):
        with pytest.raises(DomainError):
            Profile.from_rows([["1", "0", "0"], ["3", "1", "1"]], "rational")
