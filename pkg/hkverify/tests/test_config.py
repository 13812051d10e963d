# test_config.py
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

import pytest

import hkverify.settings as settings

from hkverify.core.errors import DomainError
from hkverify.tests.conftest import BaseTest
from hkverify.utils.config import (
    apply_settings,
    from_environment,
    load_config,
    resolve,
)
from hkverify.utils.misc import parse_setting

CAMPAIGN = """
[arith]
mode = rational

[run]
jobs = 3
seed = 99

[simulate]
L = 1/3
n = 9
"""


class TestConfig(BaseTest):
    def write_config(self, text, filename="campaign.ini"):
        path = self.path(filename)
        with open(path, "w") as stream:
            stream.write(text)
        return path

    def test_flat_keys(self):
        values = load_config(self.write_config(CAMPAIGN))
        assert values == {
            "arith.mode": "rational",
            "run.jobs": 3,
            "run.seed": 99,
            "simulate.L": "1/3",
            "simulate.n": 9,
        }

    def test_unknown_section(self):
        path = self.write_config("[plotting]\ncolor = red\n")
        with pytest.raises(DomainError):
            load_config(path)

    def test_missing_file(self):
        with pytest.raises(DomainError):
            load_config(self.path("absent.ini"))

    def test_precedence(self):
        file_values = load_config(self.write_config(CAMPAIGN))
        merged = resolve(
            file_values,
            {"run.seed": 5, "simulate.n": None},
            environ={"HK_JOBS": "7"},
        )
        assert merged["run.seed"] == 5
        assert merged["run.jobs"] == 7
        assert merged["simulate.n"] == 9
        assert merged["arith.mode"] == "rational"
        assert merged["arith.precision_bits"] == settings.PRECISION_BITS

    def test_environment(self):
        assert from_environment({}) == {}
        assert from_environment({"HK_JOBS": "4"}) == {"run.jobs": 4}
        with pytest.raises(DomainError):
            from_environment({"HK_JOBS": "many"})

    def test_apply_settings(self):
        apply_settings({"arith.mode": "rational", "run.freeze_cap": 50})
        assert settings.ARITH_MODE == "rational"
        assert settings.FREEZE_CAP == 50

    def test_apply_rejects_unknown_mode(self):
        with pytest.raises(DomainError):
            apply_settings({"arith.mode": "decimal"})

    def test_decimal_literals_stay_exact(self):
        values = load_config(
            self.write_config("[grid]\neps = 5e-4\ndelta = 0.01\nn = 10001\n")
        )
        assert values == {"grid.eps": "5e-4", "grid.delta": "0.01", "grid.n": 10001}


class TestParseSetting:
    @pytest.mark.parametrize(
        "text, value",
        [(" 42 ", 42), ("yes", True), ("Off", False), ("ball", "ball"), ("1/3", "1/3")],
    )
    def test_values(self, text, value):
        assert parse_setting(text) == value
