# plotting.py
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
Optional matplotlib helpers. The data functions work without matplotlib; the
plotting functions need the `graphics` extra.
"""

from typing import TYPE_CHECKING, Iterable, List, Optional, Tuple

import numpy as np

import hkverify.utils.misc as utils

try:
    import matplotlib.pyplot as plt
except ImportError:
    _HAS_MATPLOTLIB = False
else:
    _HAS_MATPLOTLIB = True

if TYPE_CHECKING:
    from matplotlib.axes import Axes
    from matplotlib.figure import Figure

    from hkverify.core.storage import EnvelopeTrace, Trajectory


def trajectory_data(
    trajectory: "Trajectory", steps: Optional[Iterable[int]] = None
) -> Tuple[np.ndarray, List[int], np.ndarray]:
    """Agent indices, the selected times and midpoint opinions, one row per time.

    Parameters
    ----------
    trajectory:
        evolution to show
    steps:
        times to include; default: all recorded states
    """
    times = list(range(len(trajectory))) if steps is None else list(steps)
    rows = []
    for t in times:
        low, high = trajectory[t].float_bounds()
        rows.append(0.5 * (low + high))
    indices = np.arange(1, trajectory[0].n + 1)
    return indices, times, np.asarray(rows)


def envelope_data(
    trace: "EnvelopeTrace", t: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lower and upper edges of the envelope band around the base state at time t,
    as floats rounded outward."""
    profile, envelope = trace[t]
    ctx = envelope.ctx
    low, high = profile.float_bounds()
    lower = low - np.asarray([ctx.hi_float(value) for value in envelope.e_l])
    upper = high + np.asarray([ctx.hi_float(value) for value in envelope.e_r])
    return np.arange(1, profile.n + 1), lower, upper


@utils.needs_matplotlib(_HAS_MATPLOTLIB)
def trajectory(
    trajectory: "Trajectory", steps: Optional[Iterable[int]] = None, **kwargs
) -> Tuple["Figure", "Axes"]:
    """Opinion against agent index, one line per time step.

    Parameters
    ----------
    trajectory:
        evolution to show
    steps:
        times to include; default: all recorded states
    **kwargs:
        `fig_ax` = (Figure, Axes) to draw into; `filename` to save the figure

    Returns
    -------
        matplotlib objects for further editing
    """
    fig, axes = kwargs.get("fig_ax") or plt.subplots()
    indices, times, rows = trajectory_data(trajectory, steps)
    for t, row in zip(times, rows):
        axes.plot(indices, row, marker=".", markersize=3, label="t={}".format(t))
    axes.set_xlabel("agent i")
    axes.set_ylabel("opinion")
    axes.legend(loc="upper left", fontsize="small")
    if kwargs.get("filename"):
        fig.savefig(kwargs["filename"])
    return fig, axes


@utils.needs_matplotlib(_HAS_MATPLOTLIB)
def envelope(trace: "EnvelopeTrace", t: int, **kwargs) -> Tuple["Figure", "Axes"]:
    """Base state at time t with its deviation band."""
    fig, axes = kwargs.get("fig_ax") or plt.subplots()
    indices, lower, upper = envelope_data(trace, t)
    profile, _ = trace[t]
    low, high = profile.float_bounds()
    axes.fill_between(indices, lower, upper, alpha=0.3, step="mid")
    axes.plot(indices, 0.5 * (low + high), linewidth=1)
    axes.set_xlabel("agent i")
    axes.set_ylabel("opinion at t={}".format(t))
    if kwargs.get("filename"):
        fig.savefig(kwargs["filename"])
    return fig, axes
