# stochastic.py
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
Monte-Carlo experiments on uniformly random initial profiles: sampling of empirical
quantile profiles, their distance to the linear profile, and cluster-count
statistics of the frozen states.

Trial t of a run with seed s draws from its own stream seeded by (s, t), so results
do not depend on the order or the number of processes.
"""

import logging
import math
import warnings

from collections import Counter
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.stats

import hkverify.core.constants as const
import hkverify.io_utils.fileio_serializers as serializers
import hkverify.settings as settings

from hkverify.core.errors import DomainError
from hkverify.core.numerics import exact
from hkverify.core.profile import Profile, clusters, diameter, uniform_random
from hkverify.core.update import evolve
from hkverify.utils.cpu_switch import get_map_method
from hkverify.utils.misc import InfoBar, progress
from hkverify.utils.typedefs import ScalarLike

if TYPE_CHECKING:
    from hkverify.io_utils.fileio import IOData

LOGGER = logging.getLogger(__name__)

# confidence level of the Dvoretzky-Kiefer-Wolfowitz band reported with sup-distances
DKW_ALPHA = 0.05


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator of trial `trial` in a run seeded with `seed`."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def sample_uniform_profile(
    n: int,
    L: ScalarLike,
    seed: int,
    mode: str = "float",
    precision_bits: Optional[int] = None,
) -> Profile:
    """Empirical quantile profile of n i.i.d. uniform draws on [0, L], sorted.
    Deterministic per seed."""
    return uniform_random(
        n, L, np.random.default_rng(seed), mode=mode, precision_bits=precision_bits
    )


def sup_distance(f: Profile, L: ScalarLike) -> float:
    """Kolmogorov distance between the empirical distribution of the opinions of
    `f` and U[0, L]; zero for L = 0 when all opinions vanish."""
    length = float(exact(L))
    low, high = f.float_bounds()
    sample = 0.5 * (low + high)
    if length == 0.0:
        return 0.0 if np.all(sample == 0.0) else 1.0
    return float(scipy.stats.kstest(sample, "uniform", args=(0.0, length)).statistic)


def dkw_bound(n: int, alpha: float = DKW_ALPHA) -> float:
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz confidence band at level
    1 - alpha for n samples."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


TrialTask = Tuple[int, Any, int, int, Optional[int], str]


def _run_trial(task: TrialTask) -> Dict[str, Any]:
    """One trial as plain data, usable across processes."""
    n, L, seed, trial, freeze_cap, mode = task
    f = uniform_random(n, L, trial_rng(seed, trial), mode=mode)
    trajectory = evolve(f, freeze_cap=freeze_cap)
    final = trajectory.final
    decomposition = clusters(final)
    if trajectory.frozen_at is not None and not decomposition.frozen:
        warnings.warn(
            "trial {}: frozen state with clusters at distance <= 1".format(trial),
            Warning,
        )
    return {
        "trial": trial,
        "clusters": decomposition.count,
        "freeze_t": trajectory.frozen_at,
        "diameter_final": final.ctx.hi_float(diameter(final)),
        "sup_distance": sup_distance(f, L),
        "capped": trajectory.capped,
    }


class McSummary(serializers.Serializable):
    """Cluster-count statistics of a Monte-Carlo run.

    Parameters
    ----------
    n, L, trials, seed:
        run parameters; L as a string literal
    records:
        per-trial dicts with keys trial, clusters, freeze_t, diameter_final and
        optionally sup_distance, capped
    """

    def __init__(
        self,
        n: int,
        L: str,
        trials: int,
        seed: int,
        records: List[Dict[str, Any]],
    ) -> None:
        if trials < 1 or len(records) != trials:
            raise DomainError("need one record per trial")
        self.n = n
        self.L = str(L)
        self.trials = trials
        self.seed = seed
        self.records = sorted(records, key=lambda record: int(record["trial"]))

    @property
    def capped(self) -> int:
        return sum(1 for record in self.records if record.get("capped"))

    @property
    def histogram(self) -> Dict[int, int]:
        """Cluster counts of the trials that froze."""
        counts = Counter(
            int(record["clusters"])
            for record in self.records
            if not record.get("capped")
        )
        return dict(sorted(counts.items()))

    @property
    def consensus_fraction(self) -> float:
        return self.histogram.get(1, 0) / self.trials

    @property
    def modal_clusters(self) -> Optional[int]:
        histogram = self.histogram
        if not histogram:
            return None
        return max(histogram, key=lambda count: (histogram[count], -count))

    def _freeze_times(self) -> List[int]:
        return [
            int(record["freeze_t"])
            for record in self.records
            if record.get("freeze_t") not in (None, "")
        ]

    @property
    def freeze_mean(self) -> Optional[float]:
        times = self._freeze_times()
        return float(np.mean(times)) if times else None

    @property
    def freeze_max(self) -> Optional[int]:
        times = self._freeze_times()
        return max(times) if times else None

    @property
    def sup_distances(self) -> np.ndarray:
        return np.asarray(
            [
                float(record["sup_distance"])
                for record in self.records
                if record.get("sup_distance") is not None
            ]
        )

    def summary(self) -> Dict[str, Any]:
        distances = self.sup_distances
        spread = (np.median(distances), np.max(distances)) if len(distances) else None
        return {
            "n": self.n,
            "L": self.L,
            "trials": self.trials,
            "seed": self.seed,
            "histogram": {str(key): value for key, value in self.histogram.items()},
            "consensus_fraction": self.consensus_fraction,
            "freeze_mean": self.freeze_mean,
            "freeze_max": self.freeze_max,
            "capped": self.capped,
            "sup_distance_median": None if spread is None else float(spread[0]),
            "sup_distance_max": None if spread is None else float(spread[1]),
            "dkw_bound": dkw_bound(self.n),
        }

    def rows(self) -> List[List[str]]:
        rows = []
        for record in self.records:
            freeze_t = record.get("freeze_t")
            rows.append(
                [
                    str(record["trial"]),
                    str(record["clusters"]),
                    "" if freeze_t in (None, "") else str(freeze_t),
                    repr(float(record["diameter_final"])),
                ]
            )
        return rows

    def serialize(self) -> "IOData":
        from hkverify.io_utils.fileio import IOData

        attributes = self.summary()
        attributes["columns"] = const.TRIALS_HEADER
        return IOData(
            "McSummary", attributes, {"table": np.asarray(self.rows(), dtype=object)}
        )

    @classmethod
    def deserialize(cls, io_data: "IOData") -> "McSummary":
        records = []
        for row in io_data.ndarrays["table"]:
            trial, count, freeze_t, final_diameter = (str(entry) for entry in row)
            records.append(
                {
                    "trial": int(trial),
                    "clusters": int(count),
                    "freeze_t": int(freeze_t) if freeze_t else None,
                    "diameter_final": float(final_diameter),
                    "capped": not freeze_t,
                }
            )
        attributes = io_data.attributes
        return cls(
            int(attributes.get("n", 0)),
            attributes.get("L", ""),
            len(records),
            int(attributes.get("seed", 0)),
            records,
        )

    def __repr__(self) -> str:
        return "McSummary(n={}, L={}, trials={}, histogram={})".format(
            self.n, self.L, self.trials, self.histogram
        )


def consensus_rate(
    n: int,
    L: ScalarLike,
    trials: int,
    seed: Optional[int] = None,
    freeze_cap: Optional[int] = None,
    mode: str = "float",
    num_cpus: Optional[int] = None,
) -> McSummary:
    """Evolve `trials` uniformly random profiles to freezing and collect their
    cluster counts.

    Parameters
    ----------
    n:
        number of agents
    L:
        width of the uniform distribution
    trials:
        number of trials, at least 1
    seed:
        base seed; default `settings.SEED`
    freeze_cap:
        step limit per trial; capped trials are left out of the histogram
    mode:
        arithmetic mode, float by default; rational for small-n validation
    num_cpus:
        worker processes; default `settings.NUM_CPUS`
    """
    if trials < 1:
        raise DomainError("need at least one trial, got {}".format(trials))
    if n < 1:
        raise DomainError("need at least one agent, got n={}".format(n))
    seed = settings.SEED if seed is None else seed
    literal = str(exact(L))
    tasks = [(n, literal, seed, trial, freeze_cap, mode) for trial in range(trials)]
    num_cpus = settings.NUM_CPUS if num_cpus is None else num_cpus
    if num_cpus == 1:
        records = list(map(_run_trial, progress(tasks, desc="trials", total=trials)))
    else:
        desc = "Parallel compute trials [num_cpus={}]".format(num_cpus)
        with InfoBar(desc, num_cpus):
            records = list(get_map_method(num_cpus)(_run_trial, tasks))
    summary = McSummary(n, literal, trials, seed, records)
    if summary.capped:
        warnings.warn(
            "{} of {} trials reached the freeze cap".format(summary.capped, trials),
            Warning,
        )
    LOGGER.info(
        "n=%d L=%s: %d trials, histogram %s", n, literal, trials, summary.histogram
    )
    return summary
