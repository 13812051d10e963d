# storage.py
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

from collections import OrderedDict
from typing import TYPE_CHECKING, Any, Dict, List, NamedTuple, Optional

import numpy as np

import hkverify.core.constants as const
import hkverify.io_utils.fileio_serializers as serializers

from hkverify.core.errors import DomainError
from hkverify.core.numerics import get_context
from hkverify.core.profile import Profile, clusters, diameter, runs
from hkverify.utils.typedefs import BoundScalar

if TYPE_CHECKING:
    from hkverify.core.deviation import DeviationEnvelope
    from hkverify.io_utils.fileio import IOData


# —StepStats———————————————————————————————————————————————————————————————————————————


class StepStats(NamedTuple):
    """Summary of one state of a trajectory."""

    t: int
    diameter: BoundScalar
    cluster_count: int
    minimum: BoundScalar
    maximum: BoundScalar
    distinct_values: int

    def row(self, profile: Profile) -> List[str]:
        ctx = profile.ctx
        diameter_lo, diameter_hi = ctx.format(self.diameter)
        return [
            str(self.t),
            diameter_lo,
            diameter_hi,
            str(self.cluster_count),
            ctx.format(self.minimum)[0],
            ctx.format(self.maximum)[1],
        ]


def step_stats(t: int, profile: Profile) -> StepStats:
    return StepStats(
        t=t,
        diameter=diameter(profile),
        cluster_count=clusters(profile).count,
        minimum=profile.first(),
        maximum=profile.last(),
        distinct_values=len(runs(profile)),
    )


# —Trajectory——————————————————————————————————————————————————————————————————————————


class Trajectory(serializers.Serializable):
    """States U^t f for t = 0..T of one evolution, with per-step statistics.

    Parameters
    ----------
    states:
        profiles indexed by t; states[t+1] is the update of states[t]
    frozen_at:
        time of certified freezing, if reached
    capped:
        True if the evolution stopped at the freeze cap without freezing
    """

    def __init__(
        self,
        states: List[Profile],
        frozen_at: Optional[int] = None,
        capped: bool = False,
    ) -> None:
        if not states:
            raise DomainError("a trajectory holds at least the initial state")
        self.states = states
        self.frozen_at = frozen_at
        self.capped = capped
        self._stats: Optional[List[StepStats]] = None

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, t: int) -> Profile:
        return self.states[t]

    @property
    def T(self) -> int:
        """Index of the last recorded state."""
        return len(self.states) - 1

    @property
    def final(self) -> Profile:
        return self.states[-1]

    @property
    def stats(self) -> List[StepStats]:
        if self._stats is None:
            self._stats = [step_stats(t, state) for t, state in enumerate(self.states)]
        return self._stats

    def diameters(self) -> List[BoundScalar]:
        return [entry.diameter for entry in self.stats]

    def rows(self) -> List[List[str]]:
        """Rows `t,i,opinion_lo,opinion_hi` of all states."""
        table = []
        for t, state in enumerate(self.states):
            for row in state.rows():
                table.append([str(t)] + row)
        return table

    def stats_rows(self) -> List[List[str]]:
        return [entry.row(self.states[entry.t]) for entry in self.stats]

    def serialize(self) -> "IOData":
        from hkverify.io_utils.fileio import IOData

        return IOData(
            "Trajectory",
            {"columns": const.TRAJECTORY_HEADER, "mode": self.states[0].mode},
            {"table": np.asarray(self.rows(), dtype=object)},
        )

    @classmethod
    def deserialize(cls, io_data: "IOData") -> "Trajectory":
        grouped: Dict[int, List[Any]] = OrderedDict()
        for row in io_data.ndarrays["table"]:
            grouped.setdefault(int(row[0]), []).append(list(row[1:]))
        mode = io_data.attributes.get("mode")
        states = [Profile.from_rows(rows, mode=mode) for rows in grouped.values()]
        return cls(states)

    def __repr__(self) -> str:
        return "Trajectory(T={}, frozen_at={}, capped={})".format(
            self.T, self.frozen_at, self.capped
        )


# —EnvelopeTrace———————————————————————————————————————————————————————————————————————


class EnvelopeTrace(serializers.Serializable):
    """Base profiles U^t f and propagated deviation envelopes for t = 0..T.

    Parameters
    ----------
    profiles:
        base states, profiles[t] = U^t f
    envelopes:
        envelopes[t] sound for profiles[t]
    failure:
        reason the propagation stopped early, if it did
    """

    def __init__(
        self,
        profiles: List[Profile],
        envelopes: List["DeviationEnvelope"],
        failure: Optional[str] = None,
    ) -> None:
        if len(profiles) != len(envelopes):
            raise DomainError("one envelope per recorded profile is required")
        self.profiles = profiles
        self.envelopes = envelopes
        self.failure = failure

    def __len__(self) -> int:
        return len(self.envelopes)

    def __getitem__(self, t: int):
        return self.profiles[t], self.envelopes[t]

    @property
    def T(self) -> int:
        return len(self.envelopes) - 1

    def extremes(self) -> List[Dict[str, Any]]:
        """Per step: t, diameter of the base state, e_l(1) and e_r(n)."""
        records = []
        for t, (profile, envelope) in enumerate(zip(self.profiles, self.envelopes)):
            records.append(
                {
                    "t": t,
                    "diameter": diameter(profile),
                    "el1": envelope.e_l[0],
                    "ern": envelope.e_r[-1],
                }
            )
        return records

    def rows(self) -> List[List[str]]:
        """Rows `t,i,e_l,e_r` with upper endpoints of the envelope entries."""
        table = []
        for t, envelope in enumerate(self.envelopes):
            ctx = envelope.ctx
            for index, (left, right) in enumerate(zip(envelope.e_l, envelope.e_r), 1):
                table.append(
                    [str(t), str(index), ctx.format(left)[1], ctx.format(right)[1]]
                )
        return table

    def serialize(self) -> "IOData":
        from hkverify.io_utils.fileio import IOData

        return IOData(
            "EnvelopeTrace",
            {"columns": const.ENVELOPE_HEADER, "mode": self.envelopes[0].ctx.mode},
            {"table": np.asarray(self.rows(), dtype=object)},
        )

    @classmethod
    def deserialize(cls, io_data: "IOData") -> "EnvelopeTrace":
        from hkverify.core.deviation import DeviationEnvelope

        ctx = get_context(io_data.attributes.get("mode"))
        grouped: Dict[int, List[Any]] = OrderedDict()
        for row in io_data.ndarrays["table"]:
            grouped.setdefault(int(row[0]), []).append(row)
        envelopes = []
        for rows in grouped.values():
            rows = sorted(rows, key=lambda row: int(row[1]))
            envelopes.append(
                DeviationEnvelope(
                    [ctx.parse(row[2]) for row in rows],
                    [ctx.parse(row[3]) for row in rows],
                    ctx,
                )
            )
        return cls([None] * len(envelopes), envelopes)

    def __repr__(self) -> str:
        return "EnvelopeTrace(T={}, failure={})".format(self.T, self.failure)
