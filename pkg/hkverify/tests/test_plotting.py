# test_plotting.py
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

import numpy as np
import pytest

import hkverify.utils.plotting as plot

from hkverify.core.deviation import DeviationEnvelope, envelope_evolve
from hkverify.core.profile import equally_spaced, from_values
from hkverify.core.update import evolve
from hkverify.tests.conftest import BaseTest
from hkverify.utils.misc import needs_matplotlib


class TestPlotData:
    def test_trajectory_rows(self):
        trajectory = evolve(from_values([0, 0, 1, 2, 3, 3], mode="rational"), T=1)
        indices, times, rows = plot.trajectory_data(trajectory)
        assert list(indices) == [1, 2, 3, 4, 5, 6]
        assert times == [0, 1]
        assert rows.shape == (2, 6)
        assert rows[1][2] == pytest.approx(0.75)

    def test_selected_steps(self):
        trajectory = evolve(equally_spaced(5, 2, mode="float"), T=3)
        _, times, rows = plot.trajectory_data(trajectory, steps=[0, 3])
        assert times == [0, 3]
        assert rows.shape == (2, 5)

    def test_envelope_band_contains_base(self):
        f = equally_spaced(7, 3, mode="rational")
        trace = envelope_evolve(f, DeviationEnvelope.tent(7, "0.01", f.ctx), 1)
        indices, lower, upper = plot.envelope_data(trace, 0)
        values, _ = f.float_bounds()
        assert len(indices) == 7
        assert np.all(lower <= values) and np.all(values <= upper)
        assert upper[-1] - values[-1] == pytest.approx(0.0075)


class TestFigures(BaseTest):
    def test_trajectory_saved(self):
        pytest.importorskip("matplotlib")
        trajectory = evolve(equally_spaced(9, 3, mode="float"), T=2)
        fig, axes = plot.trajectory(trajectory, filename=self.path("traj.png"))
        assert len(axes.get_lines()) == 3

    def test_envelope_figure(self):
        pytest.importorskip("matplotlib")
        f = equally_spaced(5, 2, mode="rational")
        trace = envelope_evolve(f, DeviationEnvelope.tent(5, "0.01", f.ctx), 1)
        fig, axes = plot.envelope(trace, 1)
        assert axes.get_ylabel() == "opinion at t=1"

    def test_missing_matplotlib_named(self):
        @needs_matplotlib(False)
        def draw():
            return "drawn"

        with pytest.raises(ImportError, match="draw draws with matplotlib"):
            draw()
        assert needs_matplotlib(True)(draw.__wrapped__)() == "drawn"
