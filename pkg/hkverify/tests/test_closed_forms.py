# test_closed_forms.py
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

import pytest

from hkverify.core.closed_forms import closed_form_profile, closed_form_update
from hkverify.core.errors import DomainError
from hkverify.core.profile import equally_spaced
from hkverify.core.update import update

LENGTHS = [Fraction(3, 2), Fraction(3), Fraction(6)]


class TestClosedForms:
    def test_first_agent(self):
        # agent 1 sees opinions 0, 1/2 and 1
        assert closed_form_update(7, 3, 1, 1) == Fraction(1, 2)

    def test_symmetry(self):
        for n in (7, 21, 51):
            for length in LENGTHS:
                for t in (1, 2):
                    values = closed_form_profile(n, length, t)
                    for i in range(n):
                        assert values[i] + values[n - 1 - i] == length

    @pytest.mark.parametrize("length", LENGTHS)
    def test_matches_simulator(self, length):
        for n in range(5, 102, 2):
            state = equally_spaced(n, length, mode="rational")
            for t in (1, 2):
                state = update(state)
                assert state.as_fractions() == closed_form_profile(n, length, t)

    def test_full_window(self):
        # diameter below 1: one step reaches the mean
        assert closed_form_profile(9, "0.8", 1) == [Fraction(2, 5)] * 9
        assert closed_form_profile(9, "0.8", 2) == [Fraction(2, 5)] * 9

    def test_zero_diameter(self):
        assert closed_form_profile(5, 0, 2) == [0] * 5

    def test_invalid_time(self):
        with pytest.raises(DomainError):
            closed_form_update(7, 3, 3, 1)

    def test_invalid_agent(self):
        with pytest.raises(DomainError):
            closed_form_update(7, 3, 1, 8)
