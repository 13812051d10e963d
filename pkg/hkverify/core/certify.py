# certify.py
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
Consensus certification.

Each criterion evolves base profiles together with deviation envelopes and reduces
its claim to a list of `Check`s, inequalities between enclosures. A certificate is
Certified only if every check holds certainly, twice: once when the checks are
decided, and again in an independent re-evaluation (the soundness gate) before the
certificate is emitted. A check that certainly fails makes the criterion Refuted;
undecided checks or a failed envelope propagation give Inconclusive.
"""

import logging
import math

from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import hkverify.core.constants as const
import hkverify.io_utils.fileio_serializers as serializers
import hkverify.settings as settings

from hkverify.core.deviation import DeviationEnvelope, envelope_evolve
from hkverify.core.errors import CertificationFailure, DomainError
from hkverify.core.numerics import ArithmeticContext, Trichotomy, exact, get_context
from hkverify.core.partition import GoodPartition, candidate_partitions
from hkverify.core.profile import (
    Profile,
    clusters,
    diameter,
    equally_spaced,
    is_symmetric,
)
from hkverify.core.storage import EnvelopeTrace
from hkverify.core.update import is_frozen
from hkverify.utils.cpu_switch import get_map_method
from hkverify.utils.misc import InfoBar, progress
from hkverify.utils.typedefs import BoundScalar, ScalarLike, VerdictName

LOGGER = logging.getLogger(__name__)

HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"


# —Checks——————————————————————————————————————————————————————————————————————————————


class Check:
    """Inequality lhs <= rhs (or lhs < rhs if `strict`) between enclosures.

    Parameters
    ----------
    name:
        label recorded in the certificate
    lhs, rhs:
        sides of the inequality; exact numbers are converted into `ctx`
    ctx:
        arithmetic context deciding the comparison
    strict:
        require lhs < rhs
    """

    def __init__(
        self,
        name: str,
        lhs: Any,
        rhs: Any,
        ctx: ArithmeticContext,
        strict: bool = False,
    ) -> None:
        self.name = name
        self.ctx = ctx
        self.lhs = ctx.convert(lhs)
        self.rhs = ctx.convert(rhs)
        self.strict = strict
        self.margin = self.rhs - self.lhs
        self.status = self._decide()

    def _decide(self) -> str:
        test = self.ctx.compare(self.lhs, self.rhs)
        if test is Trichotomy.UNKNOWN:
            return UNKNOWN
        if self.strict:
            return HOLDS if test is Trichotomy.CERTAINLY_LESS else FAILS
        return FAILS if test is Trichotomy.CERTAINLY_GREATER else HOLDS

    def recheck(self) -> bool:
        """Decide the inequality again from its sides, without `compare`."""
        if self.strict:
            return self.ctx.certainly_less(self.lhs, self.rhs)
        return self.ctx.certainly_le(self.lhs, self.rhs)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def record(self) -> Dict[str, Any]:
        margin_lo, margin_hi = self.ctx.format(self.margin)
        return {
            "name": self.name,
            "margin_lo": margin_lo,
            "margin_hi": margin_hi,
            "strict": self.strict,
            "status": self.status,
        }

    def __repr__(self) -> str:
        return "Check({}, {})".format(self.name, self.status)


def soundness_gate(checks: Sequence[Check]) -> bool:
    """True iff every check holds when re-decided independently."""
    return bool(checks) and all(check.holds and check.recheck() for check in checks)


def _verdict(checks: Sequence[Check]) -> Tuple[VerdictName, Optional[str]]:
    failed = [check.name for check in checks if check.status == FAILS]
    if failed:
        return const.REFUTED, "failed: {}".format(", ".join(failed))
    undecided = [check.name for check in checks if check.status == UNKNOWN]
    if undecided:
        return const.INCONCLUSIVE, "undecided: {}".format(", ".join(undecided))
    if not soundness_gate(checks):
        return const.INCONCLUSIVE, "re-evaluation did not confirm every check"
    return const.CERTIFIED, None


# —Certificate—————————————————————————————————————————————————————————————————————————


class Certificate(serializers.Serializable):
    """Outcome of a certification run with its evidence.

    Parameters
    ----------
    verdict:
        Certified, Inconclusive or Refuted
    criterion:
        name of the criterion
    params:
        parameters of the run, JSON-ready
    evidence:
        per-step extremes, partition and inequality margins, JSON-ready
    arith:
        arithmetic mode and precision
    """

    def __init__(
        self,
        verdict: VerdictName,
        criterion: str,
        params: Dict[str, Any],
        evidence: Dict[str, Any],
        arith: Dict[str, Any],
    ) -> None:
        if verdict not in const.EXIT_CODES:
            raise DomainError("unknown verdict '{}'".format(verdict))
        self.verdict = verdict
        self.criterion = criterion
        self.params = params
        self.evidence = evidence
        self.arith = arith

    @property
    def certified(self) -> bool:
        return self.verdict == const.CERTIFIED

    @property
    def exit_code(self) -> int:
        return const.EXIT_CODES[self.verdict]

    @property
    def reason(self) -> Optional[str]:
        return self.evidence.get("reason")

    def as_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "criterion": self.criterion,
            "params": self.params,
            "evidence": self.evidence,
            "arith": self.arith,
        }

    def __repr__(self) -> str:
        return "Certificate({}, {})".format(self.criterion, self.verdict)


def _arith(ctx: ArithmeticContext) -> Dict[str, Any]:
    return {"mode": ctx.mode, "bits": ctx.precision_bits}


def _literal(value: ScalarLike) -> str:
    return str(exact(value))


def _step_records(trace: EnvelopeTrace) -> List[Dict[str, Any]]:
    records = []
    for entry, envelope in zip(trace.extremes(), trace.envelopes):
        ctx = envelope.ctx
        records.append(
            {
                "t": entry["t"],
                "diameter": list(ctx.format(entry["diameter"])),
                "el1": ctx.format(entry["el1"])[1],
                "ern": ctx.format(entry["ern"])[1],
            }
        )
    return records


def _certified_context(
    mode: Optional[str], precision_bits: Optional[int]
) -> ArithmeticContext:
    ctx = get_context(mode, precision_bits)
    if not ctx.certified:
        raise DomainError("certification needs rational or ball arithmetic")
    return ctx


def _build(
    criterion: str,
    params: Dict[str, Any],
    ctx: ArithmeticContext,
    checks: Sequence[Check],
    evidence: Dict[str, Any],
    verdict: Optional[VerdictName] = None,
    reason: Optional[str] = None,
) -> Certificate:
    if verdict is None:
        verdict, reason = _verdict(checks)
    evidence = dict(evidence)
    evidence["inequalities"] = [check.record() for check in checks]
    if reason is not None:
        evidence["reason"] = reason
    LOGGER.info("%s: %s (%s)", criterion, verdict, reason or "all checks hold")
    return Certificate(verdict, criterion, params, evidence, _arith(ctx))


# —theory constants————————————————————————————————————————————————————————————————————


def theory_constants(
    m: ScalarLike, M: ScalarLike
) -> Tuple[Fraction, Fraction, Fraction]:
    """One-update regularity and continuity constants.

    For a profile whose increments are bounded between m and M, the update is
    regular with bounds m' = m/(2M^2), M' = 2M^2/m and continuous with factor
    K = 17M/m.

    Parameters
    ----------
    m, M:
        bounds with 0 < m <= M

    Returns
    -------
        (m', M', K), exact
    """
    low, high = exact(m), exact(M)
    if low <= 0:
        raise DomainError("m must be positive, got {}".format(low))
    if high < low:
        raise DomainError("need m <= M, got m={}, M={}".format(low, high))
    return low / (2 * high ** 2), 2 * high ** 2 / low, 17 * high / low


def theory_constants_sequence(
    m0: ScalarLike, M0: ScalarLike, T: int
) -> List[Tuple[int, Fraction, Fraction, Fraction]]:
    """(t, m_t, M_t, K_t) for t = 1..T, iterating `theory_constants` from (m0, M0).
    The ratio M_t/m_t grows doubly exponentially."""
    low, high = exact(m0), exact(M0)
    sequence = []
    for t in range(1, T + 1):
        low, high, factor = theory_constants(low, high)
        sequence.append((t, low, high, factor))
    return sequence


# —symmetric center————————————————————————————————————————————————————————————————————


def certify_symmetric_center(
    f: Profile, env0: DeviationEnvelope, T: int
) -> Certificate:
    """Certify consensus of every even canonical refinement of a symmetric profile
    on an odd number of agents.

    The central agent of a symmetric profile never moves. Once
    D(U^t f) + e_l^t(1) + e_r^t(n) < 2, every agent of every profile within the
    envelope sees the central agent, and the next update is a consensus.

    Parameters
    ----------
    f:
        symmetric profile, n odd
    env0:
        deviation envelope of the refinements at time 0 (zero for canonical ones)
    T:
        last time step tried

    Returns
    -------
        Certified at the first t <= T meeting the criterion; Refuted if the base
        trajectory freezes into several clusters before; Inconclusive otherwise
    """
    ctx = f.ctx
    if not ctx.certified:
        raise DomainError("certification needs rational or ball arithmetic")
    if f.n % 2 == 0:
        raise DomainError("the symmetric-center criterion needs odd n")
    symmetric, center = is_symmetric(f)
    if not symmetric:
        raise DomainError("the symmetric-center criterion needs a symmetric profile")
    two = ctx.convert(2)
    params = {"n": f.n, "T": T, "center": None if center is None else str(center)}

    def criterion(t: int, profile: Profile, envelope: DeviationEnvelope) -> bool:
        el1, ern = envelope.extremes()
        return ctx.certainly_less(diameter(profile) + el1 + ern, two)

    try:
        trace = envelope_evolve(f, env0, T, stop_when=criterion)
    except CertificationFailure as error:
        return _build(
            const.CRITERION_SYMMETRIC_CENTER,
            params,
            ctx,
            [],
            {"steps": []},
            verdict=const.INCONCLUSIVE,
            reason=str(error),
        )
    profile, envelope = trace[trace.T]
    el1, ern = envelope.extremes()
    check = Check(
        "diameter_plus_extremes_below_2",
        diameter(profile) + el1 + ern,
        two,
        ctx,
        strict=True,
    )
    params["t"] = trace.T
    evidence = {"steps": _step_records(trace)}
    if check.holds:
        return _build(const.CRITERION_SYMMETRIC_CENTER, params, ctx, [check], evidence)
    final_clusters = clusters(profile)
    if final_clusters.count > 1 and final_clusters.frozen and is_frozen(profile):
        return _build(
            const.CRITERION_SYMMETRIC_CENTER,
            params,
            ctx,
            [check],
            evidence,
            verdict=const.REFUTED,
            reason="froze into {} clusters".format(final_clusters.count),
        )
    return _build(
        const.CRITERION_SYMMETRIC_CENTER,
        params,
        ctx,
        [check],
        evidence,
        verdict=const.INCONCLUSIVE,
        reason="criterion not met within {} steps".format(T),
    )


# —grid interval———————————————————————————————————————————————————————————————————————


def grid_points(
    L_lo: ScalarLike, L_hi: ScalarLike, n: int, eps: ScalarLike
) -> List[Fraction]:
    """Diameters L_j = L_lo + j s, s = 2 eps (n-1)/(n+1), covering [L_lo, L_hi]: every
    L in the interval lies in some [L_j, L_j + s], and the tent envelope of width
    eps seeded at L_j contains the centered profile of diameter L."""
    low, high, width = exact(L_lo), exact(L_hi), exact(eps)
    if width <= 0:
        raise DomainError("eps must be positive")
    if high < low:
        raise DomainError("need L_lo <= L_hi")
    spacing = 2 * width * Fraction(n - 1, n + 1)
    count = max(1, math.ceil((high - low) / spacing))
    return [low + j * spacing for j in range(count)]


GridTask = Tuple[Fraction, int, Fraction, Fraction, int, str, Optional[int]]


def _grid_point(task: GridTask) -> Dict[str, Any]:
    """Certify one grid diameter; returns plain data for use across processes."""
    length, n, eps, delta, T, mode, bits = task
    ctx = get_context(mode, bits)
    f = equally_spaced(n, length, offset=-length / 2, mode=mode, precision_bits=bits)
    envelope0 = DeviationEnvelope.tent(n, eps, ctx)
    bound = ctx.convert(2 - 2 * delta)
    small = ctx.convert(delta)

    def reached(t: int, profile: Profile, envelope: DeviationEnvelope) -> bool:
        el1, ern = envelope.extremes()
        return (
            ctx.certainly_le(diameter(profile), bound)
            and ctx.certainly_less(el1, small)
            and ctx.certainly_less(ern, small)
        )

    record: Dict[str, Any] = {"L": str(length), "t": None, "reason": None}
    try:
        trace = envelope_evolve(f, envelope0, T, stop_when=reached)
    except CertificationFailure as error:
        record.update(verdict=const.INCONCLUSIVE, reason=str(error), inequalities=[])
        return record
    profile, envelope = trace[trace.T]
    el1, ern = envelope.extremes()
    checks = [
        Check("diameter_below_2_minus_2delta", diameter(profile), bound, ctx),
        Check("el1_below_delta", el1, small, ctx, strict=True),
        Check("ern_below_delta", ern, small, ctx, strict=True),
    ]
    if soundness_gate(checks):
        record.update(verdict=const.CERTIFIED, t=trace.T)
    else:
        record.update(
            verdict=const.INCONCLUSIVE,
            reason="conditions not met within {} steps".format(T),
        )
    record["steps"] = _step_records(trace)[-1:]
    record["inequalities"] = [check.record() for check in checks]
    return record


def certify_grid_interval(
    L_lo: ScalarLike,
    L_hi: ScalarLike,
    n: int,
    eps: ScalarLike,
    T: int,
    delta: ScalarLike,
    mode: Optional[str] = None,
    precision_bits: Optional[int] = None,
    num_cpus: Optional[int] = None,
) -> Certificate:
    """Certify consensus for every diameter L in [L_lo, L_hi] by a grid campaign.

    Each grid point starts from the centered equally spaced profile with a tent
    envelope of width `eps` and must reach, at some t <= T, diameter at most 2 - 2
    delta with extremist envelopes below delta.

    Parameters
    ----------
    L_lo, L_hi:
        interval of diameters
    n:
        odd number of agents
    eps:
        half-width of the tent envelope; grid spacing is 2 eps (n-1)/(n+1)
    T:
        last time step tried per grid point
    delta:
        margin of the consensus conditions
    num_cpus:
        worker processes; default `settings.NUM_CPUS`

    Returns
    -------
        Certified iff all grid points pass; otherwise Inconclusive with the first
        failing diameter recorded
    """
    ctx = _certified_context(mode, precision_bits)
    if n % 2 == 0 or n < 3:
        raise DomainError("grid certification needs an odd number n >= 3 of agents")
    width, margin = exact(eps), exact(delta)
    if margin <= 0:
        raise DomainError("delta must be positive")
    points = grid_points(L_lo, L_hi, n, width)
    params = {
        "L_lo": _literal(L_lo),
        "L_hi": _literal(L_hi),
        "n": n,
        "eps": str(width),
        "delta": str(margin),
        "T": T,
        "spacing": str(2 * width * Fraction(n - 1, n + 1)),
        "grid_points": len(points),
    }
    tasks = [
        (point, n, width, margin, T, ctx.mode, ctx.precision_bits) for point in points
    ]
    num_cpus = settings.NUM_CPUS if num_cpus is None else num_cpus
    LOGGER.info("grid campaign: %d diameters, %d processes", len(points), num_cpus)
    if num_cpus == 1:
        records = list(
            map(_grid_point, progress(tasks, desc="grid points", total=len(tasks)))
        )
    else:
        desc = "Parallel compute grid points [num_cpus={}]".format(num_cpus)
        with InfoBar(desc, num_cpus):
            records = list(get_map_method(num_cpus)(_grid_point, tasks))
    failing = [record for record in records if record["verdict"] != const.CERTIFIED]
    evidence: Dict[str, Any] = {"grid": records}
    if failing:
        evidence["failing_L"] = failing[0]["L"]
        verdict, reason = const.INCONCLUSIVE, "grid point L={} not certified".format(
            failing[0]["L"]
        )
    else:
        verdict, reason = const.CERTIFIED, None
    evidence["inequalities"] = []
    if reason is not None:
        evidence["reason"] = reason
    LOGGER.info("%s: %s", const.CRITERION_GRID, verdict)
    return Certificate(verdict, const.CRITERION_GRID, params, evidence, _arith(ctx))


# —six to consensus————————————————————————————————————————————————————————————————————


def _six_to_consensus_checks(
    n: int,
    L: BoundScalar,
    sizes: Dict[str, Tuple[int, int, int, int, int]],
    ctx: ArithmeticContext,
    prefix: str = "",
) -> List[Check]:
    """The three size inequalities of the consensus criterion, as checks.

    `sizes` holds three (A, B, C, D, E) size tuples: 'first' supplies A in the
    extremist term and E throughout, 'second' supplies A, B and D of the B and D
    terms, 'third' supplies A, B and C of the microcluster term. A nonpositive
    denominator makes its check fail.
    """
    A1, _, _, _, E1 = sizes["first"]
    A2, B2, _, D2, _ = sizes["second"]
    A3, B3, C3, _, _ = sizes["third"]
    half = L / 2
    checks = [
        Check(
            prefix + "extremist_reach",
            half * ctx.convert(Fraction(n - 2 * A1, n - A1)),
            1,
            ctx,
        )
    ]
    denominator = n - 2 * A2 - B2
    if denominator <= 0:
        checks.append(Check(prefix + "center_reach", 1, 0, ctx))
    else:
        center = half * ctx.convert(Fraction(n - E1, n + E1))
        checks.append(
            Check(
                prefix + "center_reach",
                center + ctx.convert(Fraction(2 * B2, denominator)),
                1,
                ctx,
            )
        )
    if denominator <= 0 or n - E1 <= 0 or A3 + B3 + C3 <= 0:
        checks.append(Check(prefix + "microcluster_pull", 1, 0, ctx))
    else:
        left = Fraction(2 * B2, denominator) + Fraction(4 * D2, n - E1)
        right = Fraction(2 * C3 * E1, (A3 + B3 + C3) * (n + E1))
        checks.append(Check(prefix + "microcluster_pull", left, right, ctx))
    return checks


def check_6tocons(
    f: Profile, p: GoodPartition, known_symmetric: bool = False
) -> Certificate:
    """Check the consensus criterion for a symmetric profile with diameter at most
    4 and a good partition whose A and E are out of sight.

    The checks are C nonempty and

        (n - 2|A|)/(n - |A|) L/2 <= 1
        (n - |E|)/(n + |E|) L/2 + 2|B|/(n - 2|A| - |B|) <= 1
        2|B|/(n - 2|A| - |B|) + 4|D|/(n - |E|) <= 2|C||E| / ((|A|+|B|+|C|)(n + |E|))

    with L the diameter of `f`.
    """
    ctx = f.ctx
    if not ctx.certified:
        raise DomainError("certification needs rational or ball arithmetic")
    if f.n % 2 == 0 or p.n != f.n:
        raise DomainError("need an odd number of agents matching the partition")
    if not known_symmetric and not is_symmetric(f)[0]:
        raise DomainError("the criterion needs a symmetric profile")
    L = diameter(f)
    if ctx.certainly_greater(L, ctx.convert(4)):
        raise DomainError("the criterion needs diameter <= 4")
    last_a, first_e = p.a[1], p.e[0]
    if not ctx.certainly_less(f.values[last_a - 1] + ctx.one, f.values[first_e - 1]):
        raise DomainError("A and E must be out of sight of one another")
    sizes = p.sizes
    checks = [Check("c_nonempty", 0, sizes[2], ctx, strict=True)]
    checks += _six_to_consensus_checks(
        f.n, L, {"first": sizes, "second": sizes, "third": sizes}, ctx
    )
    params = {"n": f.n}
    evidence = {"steps": [], "partition": p.as_dict()}
    return _build(const.CRITERION_SIX_TO_CONSENSUS, params, ctx, checks, evidence)


# —microcluster————————————————————————————————————————————————————————————————————————


def _microcluster_checks(
    profile: Profile,
    envelope: DeviationEnvelope,
    p: GoodPartition,
    L: BoundScalar,
) -> List[Check]:
    ctx = profile.ctx
    n = profile.n
    one = ctx.one
    values, e_l, e_r = profile.values, envelope.e_l, envelope.e_r
    A, B, C, D, E = p.sizes
    minus = (A - 1, B - 1, C - 1, D - 1, E - 1)
    plus = (A + 1, B + 1, C + 1, D + 1, E + 1)
    plain = (A, B, C, D, E)
    checks = [Check("sets_at_least_2", 2, min(A, C, E), ctx)]
    if min(A, C, E) < 2:
        return checks
    # first: A-, E- where alone; second: A0 with B+ and D+; third: A-, B0, C-
    checks += _six_to_consensus_checks(
        n,
        L,
        {
            "first": minus,
            "second": (plain[0], plus[1], plus[2], plus[3], minus[4]),
            "third": (minus[0], plain[1], minus[2], plain[3], minus[4]),
        },
        ctx,
    )
    first_c, last_c = p.c
    last_a = p.a[1]
    first_e, last_e = p.e
    checks.append(
        Check(
            "c_sees_first",
            values[last_c - 1] + e_r[last_c - 1],
            values[0] - e_l[0] + one,
            ctx,
        )
    )
    checks.append(
        Check(
            "c_sees_center",
            values[last_e - 1] + e_r[last_e - 1] - one,
            values[first_c - 1] - e_l[first_c - 1],
            ctx,
        )
    )
    checks.append(
        Check(
            "a_e_out_of_sight",
            values[last_a - 1] + e_r[last_a - 1],
            values[first_e - 1] - e_l[first_e - 1] - one,
            ctx,
            strict=True,
        )
    )
    return checks


def certify_microcluster(
    n: int,
    L: ScalarLike,
    t0: int,
    mode: Optional[str] = None,
    precision_bits: Optional[int] = None,
    max_partitions: int = 32,
) -> Certificate:
    """Certify consensus of U^T g for every k-regular refinement g of
    equally_spaced(n, L), uniformly in k, by the microcluster criterion at time t0.

    The base profile is evolved with a zero seed envelope. At t0 the diameter plus
    the extremist envelopes must be at most 4, and some good partition of U^t0 f,
    with visibility padded by the envelope, must satisfy the size inequalities in
    the perturbed sizes |X|-1, |X|+1 together with the padded visibility conditions.
    Partitions are tried in order of decreasing |C|.
    """
    ctx = _certified_context(mode, precision_bits)
    if n % 2 == 0 or n < 3:
        raise DomainError("the microcluster criterion needs an odd number n >= 3")
    if t0 < 0:
        raise DomainError("t0 must be non-negative")
    params = {"n": n, "L": _literal(L), "t0": t0}
    f = equally_spaced(n, L, mode=ctx.mode, precision_bits=ctx.precision_bits)
    env0 = DeviationEnvelope.zeros(n, ctx)
    try:
        trace = envelope_evolve(f, env0, t0)
    except CertificationFailure as error:
        return _build(
            const.CRITERION_MICROCLUSTER,
            params,
            ctx,
            [],
            {"steps": []},
            verdict=const.INCONCLUSIVE,
            reason=str(error),
        )
    profile, envelope = trace[trace.T]
    evidence: Dict[str, Any] = {"steps": _step_records(trace)}
    L_t0 = diameter(profile)
    el1, ern = envelope.extremes()
    reach = Check("diameter_plus_extremes_at_most_4", L_t0 + el1 + ern, 4, ctx)
    if not reach.holds:
        return _build(const.CRITERION_MICROCLUSTER, params, ctx, [reach], evidence)
    partitions = candidate_partitions(profile, envelope, known_symmetric=True)
    if not partitions:
        return _build(
            const.CRITERION_MICROCLUSTER,
            params,
            ctx,
            [reach],
            evidence,
            verdict=const.REFUTED,
            reason="no central block out of sight of a prefix",
        )
    best = None
    for partition in partitions[:max_partitions]:
        checks = [reach] + _microcluster_checks(profile, envelope, partition, L_t0)
        if best is None:
            best = (partition, checks)
        if soundness_gate(checks):
            best = (partition, checks)
            break
    partition, checks = best
    evidence["partition"] = partition.as_dict()
    LOGGER.debug("microcluster partition sizes %s", partition.sizes)
    return _build(const.CRITERION_MICROCLUSTER, params, ctx, checks, evidence)
