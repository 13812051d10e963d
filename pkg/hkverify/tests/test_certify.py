# test_certify.py
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

import hkverify.core.constants as const

from hkverify.core.certify import (
    Certificate,
    Check,
    _grid_point,
    certify_grid_interval,
    certify_microcluster,
    certify_symmetric_center,
    check_6tocons,
    grid_points,
    soundness_gate,
    theory_constants,
    theory_constants_sequence,
)
from hkverify.core.deviation import DeviationEnvelope
from hkverify.core.errors import DomainError
from hkverify.core.numerics import get_context
from hkverify.core.partition import GoodPartition, find_good_partition
from hkverify.core.profile import equally_spaced, from_values
from hkverify.io_utils.fileio import read, write
from hkverify.tests.conftest import BaseTest

RATIONAL = get_context("rational")
NINE = ["-2", "-2", "-2", "-0.9", "0", "0.9", "2", "2", "2"]
FIFTEEN = ["-1.5"] * 4 + ["-0.5"] + ["0"] * 5 + ["0.5"] + ["1.5"] * 4


def desk_grid_point(length):
    """One grid point at n = 10001, eps = 5e-4, delta = 1e-2, T = 8."""
    task = (length, 10001, Fraction(5, 10000), Fraction(1, 100), 8, "ball", 128)
    record = _grid_point(task)
    return record, {entry["name"]: entry for entry in record["inequalities"]}


class TestTheoryConstants:
    def test_unit_bounds(self):
        assert theory_constants(1, 1) == (Fraction(1, 2), 2, 17)

    def test_substitution(self):
        assert theory_constants("1/4", 2) == (Fraction(1, 32), 32, 136)

    def test_ratio_grows_doubly_exponentially(self):
        sequence = theory_constants_sequence(1, 1, 3)
        assert [entry[0] for entry in sequence] == [1, 2, 3]
        ratios = [high / low for _, low, high, _ in sequence]
        assert ratios[2] > ratios[1] ** 2

    @pytest.mark.parametrize("m, M", [(0, 1), (-1, 1), (2, 1)])
    def test_invalid_bounds(self, m, M):
        with pytest.raises(DomainError):
            theory_constants(m, M)


class TestChecks:
    def test_status(self):
        assert Check("le", 1, 1, RATIONAL).holds
        assert not Check("lt", 1, 1, RATIONAL, strict=True).holds
        assert Check("gt", 2, 1, RATIONAL).status == "fails"

    def test_unknown_in_ball_mode(self):
        ball = get_context("ball")
        check = Check("overlap", ball.convert((0, 2)), ball.convert((1, 3)), ball)
        assert check.status == "unknown"
        assert not soundness_gate([check])

    def test_gate(self):
        checks = [Check("a", 0, 1, RATIONAL), Check("b", "1/3", "1/2", RATIONAL)]
        assert soundness_gate(checks)
        assert not soundness_gate([])
        assert not soundness_gate(checks + [Check("c", 1, 0, RATIONAL)])

    def test_record(self):
        record = Check("margin", "1/4", 1, RATIONAL, strict=True).record()
        assert record["margin_lo"] == record["margin_hi"] == "3/4"
        assert record["status"] == "holds"

    def test_unknown_verdict_rejected(self):
        with pytest.raises(DomainError):
            Certificate("Maybe", "symmetric_center", {}, {}, {})


class TestSymmetricCenter:
    def test_small_diameter(self):
        f = equally_spaced(11, "1/2", mode="rational")
        envelope = DeviationEnvelope.zeros(11, RATIONAL)
        certificate = certify_symmetric_center(f, envelope, 1)
        assert certificate.verdict == const.CERTIFIED
        assert certificate.exit_code == 0
        assert certificate.params["t"] == 0

    @pytest.mark.parametrize("T", [0, 1, 3])
    def test_frozen_fragments(self, T):
        f = equally_spaced(3, 4, mode="rational")
        envelope = DeviationEnvelope.zeros(3, RATIONAL)
        certificate = certify_symmetric_center(f, envelope, T)
        assert certificate.verdict == const.REFUTED
        assert certificate.exit_code == 3
        assert "3 clusters" in certificate.reason

    def test_not_reached(self):
        f = equally_spaced(21, 3, mode="rational")
        envelope = DeviationEnvelope.zeros(21, RATIONAL)
        certificate = certify_symmetric_center(f, envelope, 0)
        assert certificate.verdict == const.INCONCLUSIVE
        assert certificate.exit_code == 2

    def test_ball_consensus(self):
        # one step brings the diameter to about 1.21
        f = equally_spaced(201, "2.2", mode="ball")
        envelope = DeviationEnvelope.zeros(201, f.ctx)
        certificate = certify_symmetric_center(f, envelope, 4)
        assert certificate.certified
        assert certificate.params["t"] == 1
        steps = certificate.evidence["steps"]
        assert steps[-1]["t"] == certificate.params["t"]

    @pytest.mark.parametrize(
        "values, mode",
        [([0, 1], "rational"), ([0, 1, 3], "rational"), ([0, 1, 2], "float")],
    )
    def test_inapplicable(self, values, mode):
        f = from_values(values, mode=mode)
        with pytest.raises(DomainError):
            certify_symmetric_center(f, DeviationEnvelope.zeros(f.n, f.ctx), 1)


class TestGrid:
    def test_grid_points(self):
        points = grid_points("0.1", "0.9", 101, "0.05")
        spacing = Fraction(1, 10) * Fraction(100, 102)
        assert len(points) == 9
        assert points[0] == Fraction(1, 10)
        assert points[1] - points[0] == spacing
        assert points[-1] + spacing >= Fraction(9, 10)

    def test_tent_covers_grid_cells(self):
        rng = np.random.default_rng(59)
        n, eps = 21, Fraction(1, 100)
        points = grid_points(3, 4, n, eps)
        spacing = points[1] - points[0]
        envelope = DeviationEnvelope.tent(n, eps, RATIONAL)
        for _ in range(100):
            L = 3 + Fraction(int(rng.integers(0, 10001)), 10000)
            L_j = max(point for point in points if point <= L)
            assert L - L_j <= spacing
            base = equally_spaced(n, L_j, offset=-L_j / 2, mode="rational")
            other = equally_spaced(n, L, offset=-L / 2, mode="rational")
            assert envelope.contains(base, other)

    def test_below_one_certified(self):
        certificate = certify_grid_interval(
            "0.1", "0.9", 101, "0.05", 2, "0.05", num_cpus=1
        )
        assert certificate.verdict == const.CERTIFIED
        assert certificate.params["grid_points"] == 9
        assert len(certificate.evidence["grid"]) == 9
        assert "failing_L" not in certificate.evidence

    def test_failing_point_recorded(self):
        certificate = certify_grid_interval(
            3, "3.01", 21, "0.01", 0, "0.05", mode="rational", num_cpus=1
        )
        assert certificate.verdict == const.INCONCLUSIVE
        assert certificate.evidence["failing_L"] == "3"
        assert certificate.exit_code == 2

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            certify_grid_interval(0, 1, 20, "0.1", 2, "0.1", num_cpus=1)
        with pytest.raises(DomainError):
            certify_grid_interval(0, 1, 21, "0.1", 2, 0, num_cpus=1)
        with pytest.raises(DomainError):
            certify_grid_interval(0, 1, 21, "0.1", 2, "0.1", mode="float")

    @pytest.mark.slow
    def test_desk_point_below_five(self):
        # extremist envelopes outgrow delta before the diameter condition binds
        record, checks = desk_grid_point(Fraction(49, 10))
        assert record["verdict"] == const.INCONCLUSIVE
        assert checks["diameter_below_2_minus_2delta"]["status"] == "holds"
        assert checks["el1_below_delta"]["status"] == "fails"
        el1_margin = Fraction(checks["el1_below_delta"]["margin_lo"])
        diameter_margin = Fraction(checks["diameter_below_2_minus_2delta"]["margin_lo"])
        assert float(el1_margin) == pytest.approx(-0.0623, abs=5e-3)
        assert float(diameter_margin) == pytest.approx(0.161, abs=5e-3)

    @pytest.mark.slow
    def test_desk_point_in_three_cluster_window(self):
        record, _ = desk_grid_point(Fraction(27, 5))
        assert record["verdict"] == const.INCONCLUSIVE


class TestSixToConsensus:
    def test_synthetic_instance(self):
        f = from_values(FIFTEEN, mode="rational")
        partition = find_good_partition(f)
        certificate = check_6tocons(f, partition)
        assert certificate.verdict == const.CERTIFIED
        names = [entry["name"] for entry in certificate.evidence["inequalities"]]
        assert names == [
            "c_nonempty",
            "extremist_reach",
            "center_reach",
            "microcluster_pull",
        ]
        assert certificate.evidence["partition"]["sizes"] == [4, 0, 1, 0, 5]

    def test_empty_c_refuted(self):
        f = from_values(NINE, mode="rational")
        certificate = check_6tocons(f, GoodPartition(9, 3, 4, 4, 4))
        assert certificate.verdict == const.REFUTED
        assert "c_nonempty" in certificate.reason

    def test_a_sees_e(self):
        f = from_values(NINE, mode="rational")
        with pytest.raises(DomainError):
            check_6tocons(f, GoodPartition(9, 4, 4, 4, 4))


class TestMicrocluster:
    def test_no_structure_at_start(self):
        certificate = certify_microcluster(2001, 6, 0)
        assert certificate.verdict != const.CERTIFIED

    def test_even_n(self):
        with pytest.raises(DomainError):
            certify_microcluster(80004, 6, 8)

    @pytest.mark.slow
    def test_six_reproduction(self):
        certificate = certify_microcluster(80005, 6, 8)
        assert certificate.verdict == const.CERTIFIED
        assert certificate.evidence["partition"]["sizes"] == [31537, 0, 40, 3, 16845]
        margins = [
            Fraction(entry["margin_lo"])
            for entry in certificate.evidence["inequalities"]
        ]
        assert all(margin > 0 for margin in margins)


class TestCertificateFiles(BaseTest):
    def test_json_roundtrip(self):
        f = equally_spaced(3, 4, mode="rational")
        envelope = DeviationEnvelope.zeros(3, RATIONAL)
        certificate = certify_symmetric_center(f, envelope, 1)
        write(certificate, self.path("certificate.json"))
        restored = read(self.path("certificate.json"))
        assert isinstance(restored, Certificate)
        assert restored.as_dict() == certificate.as_dict()

    def test_ball_certificate_file(self):
        f = equally_spaced(201, "2.2", mode="ball")
        envelope = DeviationEnvelope.zeros(201, f.ctx)
        certificate = certify_symmetric_center(f, envelope, 4)
        write(certificate, self.path("ball.json"))
        restored = read(self.path("ball.json"))
        assert restored.verdict == const.CERTIFIED
        for entry in restored.evidence["inequalities"]:
            assert Fraction(entry["margin_lo"]) > 0
