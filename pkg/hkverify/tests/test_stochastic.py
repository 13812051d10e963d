# test_stochastic.py
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

import math
import warnings

import numpy as np
import pytest

from hkverify.core.errors import DomainError
from hkverify.core.stochastic import (
    McSummary,
    consensus_rate,
    dkw_bound,
    sample_uniform_profile,
    sup_distance,
    trial_rng,
)
from hkverify.io_utils.fileio import read, write
from hkverify.tests.conftest import BaseTest


class TestSampling:
    def test_zero_width(self):
        f = sample_uniform_profile(7, 0, seed=3)
        assert np.all(f.values == 0.0)
        assert sup_distance(f, 0) == 0.0

    def test_sorted_and_in_range(self):
        f = sample_uniform_profile(500, "2.5", seed=5)
        assert np.all(np.diff(f.values) >= 0)
        assert f.first() >= 0.0 and f.last() <= 2.5

    def test_seed_determinism(self):
        first = sample_uniform_profile(100, 3, seed=11)
        second = sample_uniform_profile(100, 3, seed=11)
        assert np.array_equal(first.values, second.values)

    def test_trial_streams_differ(self):
        assert trial_rng(1, 0).random() != trial_rng(1, 1).random()
        assert trial_rng(1, 4).random() == trial_rng(1, 4).random()

    def test_sup_distance_shrinks(self):
        def median_distance(n):
            return np.median(
                [
                    sup_distance(sample_uniform_profile(n, 4, seed=seed), 4)
                    for seed in range(30)
                ]
            )

        assert median_distance(10000) < median_distance(100)

    def test_dkw_bound(self):
        assert dkw_bound(100) == pytest.approx(math.sqrt(math.log(40.0) / 200.0))


class TestConsensusRate:
    def test_small_width_is_consensus(self, num_cpus):
        summary = consensus_rate(60, "0.5", 12, seed=2, num_cpus=num_cpus)
        assert summary.consensus_fraction == 1.0
        assert summary.histogram == {1: 12}
        assert summary.freeze_max == 1
        assert summary.modal_clusters == 1

    def test_replays_per_seed(self, num_cpus):
        first = consensus_rate(80, 3, 6, seed=9, num_cpus=num_cpus)
        second = consensus_rate(80, 3, 6, seed=9, num_cpus=1)
        assert first.rows() == second.rows()

    def test_histogram_counts_every_trial(self):
        summary = consensus_rate(100, 4, 10, seed=13, num_cpus=1)
        assert sum(summary.histogram.values()) == 10
        assert summary.capped == 0
        assert summary.summary()["trials"] == 10

    def test_capped_trials_left_out(self):
        with pytest.warns(Warning, match="freeze cap"):
            summary = consensus_rate(300, 3, 4, seed=17, freeze_cap=1, num_cpus=1)
        assert summary.capped == 4
        assert summary.histogram == {}
        assert summary.modal_clusters is None
        assert summary.consensus_fraction == 0.0

    def test_rational_mode(self):
        summary = consensus_rate(20, "0.75", 3, seed=4, mode="rational", num_cpus=1)
        assert summary.consensus_fraction == 1.0

    def test_no_trials(self):
        with pytest.raises(DomainError):
            consensus_rate(10, 1, 0)

    def test_record_count_checked(self):
        with pytest.raises(DomainError):
            McSummary(10, "1", 2, 0, [])

    def test_narrow_width_always_agrees(self):
        summary = consensus_rate(500, "0.5", 50, seed=21, num_cpus=1)
        assert summary.consensus_fraction == 1.0

    @pytest.mark.slow
    def test_width_four_mostly_agrees(self, num_cpus):
        summary = consensus_rate(20000, 4, 20, seed=23, num_cpus=num_cpus)
        assert sum(summary.histogram.values()) + summary.capped == 20
        # finite-n gate: a miss is reported, not failed
        if summary.consensus_fraction < 0.9:
            warnings.warn(
                "L=4: consensus fraction {}".format(summary.consensus_fraction),
                UserWarning,
            )

    @pytest.mark.slow
    def test_width_five_and_a_half_fragments(self, num_cpus):
        summary = consensus_rate(20000, "5.5", 20, seed=29, num_cpus=num_cpus)
        assert sum(summary.histogram.values()) + summary.capped == 20
        if summary.modal_clusters != 3:
            warnings.warn(
                "L=5.5: modal cluster count {}".format(summary.modal_clusters),
                UserWarning,
            )


class TestSummaryFiles(BaseTest):
    def test_csv_roundtrip(self):
        summary = consensus_rate(50, 2, 5, seed=21, num_cpus=1)
        write(summary, self.path("trials.csv"))
        restored = read(self.path("trials.csv"))
        assert isinstance(restored, McSummary)
        assert restored.histogram == summary.histogram
        assert restored.rows() == summary.rows()

    def test_json_keeps_parameters(self):
        summary = consensus_rate(40, "1.5", 3, seed=23, num_cpus=1)
        summary.filewrite(self.path("trials.json"))
        restored = McSummary.create_from_file(self.path("trials.json"))
        assert (restored.n, restored.L, restored.seed) == (40, "3/2", 23)
        assert restored.histogram == summary.histogram
