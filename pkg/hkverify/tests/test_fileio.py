# test_fileio.py
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

import json

from fractions import Fraction

import pytest

import hkverify.settings as settings

from hkverify.core.deviation import DeviationEnvelope, envelope_evolve
from hkverify.core.errors import DomainError
from hkverify.core.manifest import RunManifest
from hkverify.core.profile import Profile, equally_spaced, from_values
from hkverify.core.storage import EnvelopeTrace, Trajectory
from hkverify.core.update import evolve
from hkverify.io_utils.fileio import read, read_table, write, write_table
from hkverify.tests.conftest import BaseTest


class TestProfileFiles(BaseTest):
    def test_csv(self):
        settings.ARITH_MODE = "rational"
        f = from_values(["0", "1/3", "7/2"], mode="rational")
        write(f, self.path("profile.csv"))
        restored = read(self.path("profile.csv"))
        assert isinstance(restored, Profile)
        assert restored.equals(f)

    def test_json_keeps_mode(self, io_type):
        f = equally_spaced(5, "1/3", mode="ball")
        filename = self.path("profile." + io_type)
        write(f, filename)
        restored = read(filename, typename="Profile")
        for (low, high), (old_low, old_high) in zip(
            restored.endpoints(), f.endpoints()
        ):
            assert low <= old_low and old_high <= high

    def test_ball_csv_is_outward(self):
        f = from_values(["0.1", "1/3"], mode="ball")
        write(f, self.path("ball.csv"))
        table = read_table(self.path("ball.csv"))
        exact_values = [Fraction(1, 10), Fraction(1, 3)]
        for row, value in zip(table.ndarrays["table"], exact_values):
            assert Fraction(row[1]) <= value <= Fraction(row[2])


class TestTrajectoryFiles(BaseTest):
    def test_csv(self):
        settings.ARITH_MODE = "rational"
        trajectory = evolve(from_values([0, 0, 1, 2, 3, 3], mode="rational"), T=2)
        write(trajectory, self.path("trajectory.csv"))
        restored = read(self.path("trajectory.csv"))
        assert isinstance(restored, Trajectory)
        assert restored.T == 2
        for old, new in zip(trajectory.states, restored.states):
            assert old.equals(new)

    def test_stats_table(self):
        trajectory = evolve(equally_spaced(5, 2, mode="rational"), T=1)
        write_table(
            self.path("stats.csv"),
            ["t", "diameter_lo", "diameter_hi", "clusters", "min_lo", "max_hi"],
            trajectory.stats_rows(),
        )
        table = read(self.path("stats.csv"))
        assert table.typename == "table"
        assert list(table.ndarrays["table"][0][:4]) == ["0", "2", "2", "5"]


class TestEnvelopeFiles(BaseTest):
    def test_csv(self):
        settings.ARITH_MODE = "rational"
        f = equally_spaced(7, 3, mode="rational")
        trace = envelope_evolve(f, DeviationEnvelope.tent(7, "0.01", f.ctx), 2)
        write(trace, self.path("envelope.csv"))
        restored = read(self.path("envelope.csv"))
        assert isinstance(restored, EnvelopeTrace)
        assert restored.T == 2
        assert restored.profiles == [None, None, None]
        for old, new in zip(trace.envelopes, restored.envelopes):
            assert list(old.e_l) == list(new.e_l)
            assert list(old.e_r) == list(new.e_r)


class TestManifest(BaseTest):
    def test_roundtrip_and_digests(self):
        output = self.path("out.csv")
        write_table(output, ["a"], [["1"]])
        manifest = RunManifest.for_outputs(
            "simulate",
            ["--n", "3"],
            {"simulate.n": 3},
            {"mode": "rational"},
            "0",
            0.5,
            [output],
        )
        write(manifest, self.path("out.csv.manifest.json"))
        restored = read(self.path("out.csv.manifest.json"))
        assert restored.digests == manifest.digests
        assert restored.config == {"simulate.n": 3}
        assert restored.mismatches(self.tmpdir) == {}
        write_table(output, ["a"], [["2"]])
        assert restored.mismatches(self.tmpdir) == {"out.csv": "digest differs"}

    def test_sorted_keys(self):
        manifest = RunManifest("sample", [], {"b": 1, "a": 2}, {}, "0", 0.0, {})
        write(manifest, self.path("manifest.json"))
        with open(self.path("manifest.json")) as stream:
            document = json.load(stream)
        assert list(document["config"]) == ["a", "b"]

    def test_record_values_must_be_plain(self):
        profile = from_values([0, 1], mode="rational")
        manifest = RunManifest("simulate", [], {"start": profile}, {}, "0", 0.0, {})
        with pytest.raises(DomainError, match="RunManifest.config.start"):
            write(manifest, self.path("manifest.json"))

    def test_plain_objects_rejected(self):
        with pytest.raises(DomainError):
            write({"n": 3}, self.path("plain.json"))


class TestSuffix(BaseTest):
    def test_unsupported_suffix(self):
        with pytest.raises(DomainError):
            write(from_values([0, 1], mode="rational"), self.path("profile.h5"))

    def test_ragged_csv(self):
        with open(self.path("bad.csv"), "w") as stream:
            stream.write("index,opinion_lo,opinion_hi\n1,0\n")
        with pytest.raises(DomainError):
            read(self.path("bad.csv"))
