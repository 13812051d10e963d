# cli.py
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
Command line interface.

    hkverify simulate --n 6 --opinions 0,0,1,2,3,3 --steps 1 --mode rational
    hkverify certify-grid --l-lo 1 --l-hi 1.01 --n 101 --eps 0.001 --delta 0.01
    hkverify certify-l6 --n 80005 --t0 8
    hkverify sample --n 1000 --L 4 --trials 20 --seed 7
    hkverify oracle-check --n-max 200 --trials 1000 --seed 7
    hkverify replay --manifest cert.json.manifest.json

Exit status: 0 on success or Certified, 2 on Inconclusive, 3 on Refuted or on a
failed oracle check, 1 on errors. Every run writes `<out>.manifest.json` next to
its main output.
"""

import argparse
import logging
import os
import sys
import time

from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

import hkverify.core.constants as const
import hkverify.io_utils.fileio as io
import hkverify.settings as settings
import hkverify.utils.config as config

from hkverify.core.certify import certify_grid_interval, certify_microcluster
from hkverify.core.closed_forms import closed_form_profile
from hkverify.core.deviation import DeviationEnvelope, envelope_evolve
from hkverify.core.errors import CertificationFailure, DomainError, ResourceError
from hkverify.core.manifest import RunManifest, manifest_name
from hkverify.core.numerics import exact, get_context
from hkverify.core.profile import Profile, equally_spaced, from_values
from hkverify.core.stochastic import consensus_rate
from hkverify.core.update import evolve, update, update_naive
from hkverify.utils.cpu_switch import close_pool

LOGGER = logging.getLogger(__name__)

VERBOSITY = {0: logging.WARNING, 1: logging.INFO}

# subcommand -> config section
SECTIONS = {
    "simulate": "simulate",
    "certify-grid": "grid",
    "certify-l6": "l6",
    "sample": "sample",
    "oracle-check": "oracle",
}

# built-in defaults of the subcommand options, by config key
DEFAULTS: Dict[str, Any] = {
    "simulate.n": 11,
    "simulate.L": "3",
    "simulate.offset": "0",
    "simulate.eps": "0",
    "simulate.out": "trajectory.csv",
    "grid.l_lo": "1",
    "grid.l_hi": "1.01",
    "grid.n": 10001,
    "grid.eps": "0.0005",
    "grid.delta": "0.01",
    "grid.steps": 8,
    "grid.out": "cert.json",
    "l6.n": 80005,
    "l6.L": "6",
    "l6.t0": 8,
    "l6.max_partitions": 32,
    "l6.out": "cert.json",
    "sample.n": 1000,
    "sample.L": "4",
    "sample.trials": 20,
    "sample.mode": "float",
    "sample.out": "mc.csv",
    "oracle.n_max": 200,
    "oracle.trials": 1000,
    "oracle.out": "oracle.json",
}

# general options, by argparse dest
GENERAL_KEYS = {
    "mode": "arith.mode",
    "bits": "arith.precision_bits",
    "jobs": "run.jobs",
    "freeze_cap": "run.freeze_cap",
    "seed": "run.seed",
}

# oracle-check: diameters of the closed-form comparison
ORACLE_LENGTHS = (Fraction(3, 2), Fraction(3), Fraction(6))
ORACLE_CLOSED_FORM_N_MAX = 101


class UsageError(Exception):
    """Malformed command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError("{}: {}".format(self.prog, message))


def _help(key: str, text: str) -> str:
    return "{} (default: {})".format(text, DEFAULTS[key])


def _general_options(parser: argparse.ArgumentParser, mode_key: str) -> None:
    parser.add_argument(
        "--mode",
        choices=["rational", "ball", "float"],
        help="arithmetic mode (default: {})".format(
            DEFAULTS.get(mode_key, settings.ARITH_MODE)
        ),
    )
    parser.add_argument("--bits", type=int, help="ball precision in bits")
    parser.add_argument("--jobs", type=int, help="worker processes (env HK_JOBS)")
    parser.add_argument("--config", help="INI configuration file")
    parser.add_argument("--progress", action="store_true", help="show progress bars")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hkverify",
        description="Certified simulation and consensus verification for the "
        "Hegselmann-Krause bounded-confidence model.",
    )
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)

    simulate = commands.add_parser("simulate", help="evolve a profile, write CSV")
    _general_options(simulate, "arith.mode")
    simulate.add_argument("--n", type=int, help=_help("simulate.n", "agents"))
    simulate.add_argument("--L", help=_help("simulate.L", "diameter"))
    simulate.add_argument("--offset", help=_help("simulate.offset", "first opinion"))
    simulate.add_argument(
        "--opinions", help="comma separated opinions, overrides --n/--L"
    )
    simulate.add_argument("--profile", help="initial profile CSV, overrides --n/--L")
    simulate.add_argument("--steps", type=int, help="steps (default: until frozen)")
    simulate.add_argument("--freeze-cap", type=int, help="step limit")
    simulate.add_argument("--envelope", help="also propagate envelopes to this CSV")
    simulate.add_argument(
        "--eps", help=_help("simulate.eps", "tent envelope width; 0 for none")
    )
    simulate.add_argument("--stats", help="per-step statistics CSV")
    simulate.add_argument("--out", help=_help("simulate.out", "trajectory CSV"))

    grid = commands.add_parser("certify-grid", help="certify an interval of L")
    _general_options(grid, "arith.mode")
    grid.add_argument("--l-lo", help=_help("grid.l_lo", "lower diameter"))
    grid.add_argument("--l-hi", help=_help("grid.l_hi", "upper diameter"))
    grid.add_argument("--n", type=int, help=_help("grid.n", "odd number of agents"))
    grid.add_argument("--eps", help=_help("grid.eps", "tent envelope width"))
    grid.add_argument("--delta", help=_help("grid.delta", "consensus margin"))
    grid.add_argument("--steps", type=int, help=_help("grid.steps", "horizon"))
    grid.add_argument("--out", help=_help("grid.out", "certificate JSON"))

    l6 = commands.add_parser("certify-l6", help="microcluster criterion at time t0")
    _general_options(l6, "arith.mode")
    l6.add_argument("--n", type=int, help=_help("l6.n", "odd number of agents"))
    l6.add_argument("--L", help=_help("l6.L", "diameter"))
    l6.add_argument("--t0", type=int, help=_help("l6.t0", "time of the criterion"))
    l6.add_argument(
        "--max-partitions",
        type=int,
        help=_help("l6.max_partitions", "partitions tried"),
    )
    l6.add_argument("--out", help=_help("l6.out", "certificate JSON"))

    sample = commands.add_parser("sample", help="Monte-Carlo cluster counts")
    _general_options(sample, "sample.mode")
    sample.add_argument("--n", type=int, help=_help("sample.n", "agents"))
    sample.add_argument("--L", help=_help("sample.L", "width of U[0, L]"))
    sample.add_argument("--trials", type=int, help=_help("sample.trials", "trials"))
    sample.add_argument("--seed", type=int, help="base seed")
    sample.add_argument("--freeze-cap", type=int, help="step limit per trial")
    sample.add_argument("--summary", help="summary JSON")
    sample.add_argument("--out", help=_help("sample.out", "per-trial CSV"))

    oracle = commands.add_parser("oracle-check", help="compare update oracles")
    _general_options(oracle, "arith.mode")
    oracle.add_argument("--n-max", type=int, help=_help("oracle.n_max", "max agents"))
    oracle.add_argument("--trials", type=int, help=_help("oracle.trials", "profiles"))
    oracle.add_argument("--seed", type=int, help="seed")
    oracle.add_argument("--out", help=_help("oracle.out", "report JSON"))

    replay = commands.add_parser("replay", help="re-run from a manifest")
    replay.add_argument("--manifest", required=True, help="manifest JSON")
    replay.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    return parser


def _configure_logging(verbosity: int) -> None:
    level = VERBOSITY.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", force=True
    )


def _flag_values(command: str, args: argparse.Namespace) -> Dict[str, Any]:
    """Config keys of the given flags."""
    section = SECTIONS[command]
    flags = {}
    for dest, value in vars(args).items():
        if dest in ("command", "config", "progress", "verbose"):
            continue
        if dest == "mode" and command == "sample":
            key = "sample.mode"
        elif dest in GENERAL_KEYS:
            key = GENERAL_KEYS[dest]
        else:
            key = "{}.{}".format(section, dest)
        flags[key] = value
    return flags


def _resolve(
    command: str, args: argparse.Namespace, file_values: Optional[Dict[str, Any]]
) -> Dict[str, Any]:
    if file_values is None:
        file_values = config.load_config(args.config) if args.config else {}
    section = SECTIONS[command]
    merged = {
        key: value
        for key, value in DEFAULTS.items()
        if key.startswith(section + ".")
    }
    merged.update(file_values)
    return config.resolve(merged, _flag_values(command, args))


class _Run:
    """Resolved configuration of one subcommand and the files it wrote."""

    def __init__(self, command: str, cfg: Dict[str, Any]) -> None:
        self.command = command
        self.section = SECTIONS[command]
        self.cfg = cfg
        self.outputs: List[str] = []

    def get(self, name: str, default: Any = None) -> Any:
        value = self.cfg.get("{}.{}".format(self.section, name))
        return default if value is None else value

    @property
    def out(self) -> str:
        return str(self.get("out"))

    def written(self, filename: str) -> None:
        self.outputs.append(filename)

    def arith(self) -> Dict[str, Any]:
        mode = self.cfg.get("arith.mode")
        if self.command == "sample":
            mode = self.get("mode")
        ctx = get_context(mode, self.cfg.get("arith.precision_bits"))
        return {"mode": ctx.mode, "bits": ctx.precision_bits}


# —subcommands—————————————————————————————————————————————————————————————————————————


def _initial_profile(job: _Run) -> Profile:
    mode = job.cfg.get("arith.mode")
    bits = job.cfg.get("arith.precision_bits")
    if job.get("profile"):
        table = io.read_table(job.get("profile"))
        if list(table.attributes["columns"]) != const.PROFILE_HEADER:
            raise DomainError(
                "profile CSV header must be {}".format(",".join(const.PROFILE_HEADER))
            )
        return Profile.from_rows(table.ndarrays["table"], mode, bits)
    if job.get("opinions"):
        values = [entry for entry in str(job.get("opinions")).split(",") if entry]
        return from_values(values, mode=mode, precision_bits=bits)
    return equally_spaced(
        int(job.get("n")),
        str(job.get("L")),
        offset=str(job.get("offset")),
        mode=mode,
        precision_bits=bits,
    )


def _simulate(job: _Run) -> int:
    f = _initial_profile(job)
    steps = job.get("steps")
    trajectory = evolve(f, T=steps, freeze_cap=job.cfg.get("run.freeze_cap"))
    io.write(trajectory, job.out)
    job.written(job.out)
    if job.get("stats"):
        stats_file = str(job.get("stats"))
        io.write_table(stats_file, const.STATS_HEADER, trajectory.stats_rows())
        job.written(stats_file)
    if job.get("envelope"):
        eps = exact(str(job.get("eps")))
        envelope0 = (
            DeviationEnvelope.tent(f.n, eps, f.ctx)
            if eps > 0
            else DeviationEnvelope.zeros(f.n, f.ctx)
        )
        trace = envelope_evolve(f, envelope0, trajectory.T)
        envelope_file = str(job.get("envelope"))
        io.write(trace, envelope_file)
        job.written(envelope_file)
    print(
        "simulated {} agents for {} steps{}".format(
            f.n,
            trajectory.T,
            ""
            if trajectory.frozen_at is None
            else ", frozen at t={}".format(trajectory.frozen_at),
        )
    )
    return const.EXIT_OK


def _report(certificate) -> None:
    print("{}: {}".format(certificate.criterion, certificate.verdict))
    if certificate.reason:
        print("  reason: {}".format(certificate.reason))


def _certify_grid(job: _Run) -> int:
    certificate = certify_grid_interval(
        str(job.get("l_lo")),
        str(job.get("l_hi")),
        int(job.get("n")),
        str(job.get("eps")),
        int(job.get("steps")),
        str(job.get("delta")),
        mode=job.cfg.get("arith.mode"),
        precision_bits=job.cfg.get("arith.precision_bits"),
        num_cpus=job.cfg.get("run.jobs"),
    )
    io.write(certificate, job.out)
    job.written(job.out)
    _report(certificate)
    return certificate.exit_code


def _certify_l6(job: _Run) -> int:
    certificate = certify_microcluster(
        int(job.get("n")),
        str(job.get("L")),
        int(job.get("t0")),
        mode=job.cfg.get("arith.mode"),
        precision_bits=job.cfg.get("arith.precision_bits"),
        max_partitions=int(job.get("max_partitions")),
    )
    io.write(certificate, job.out)
    job.written(job.out)
    _report(certificate)
    partition = certificate.evidence.get("partition")
    if partition:
        print("  partition sizes: {}".format(partition.get("sizes")))
    return certificate.exit_code


def _sample(job: _Run) -> int:
    summary = consensus_rate(
        int(job.get("n")),
        str(job.get("L")),
        int(job.get("trials")),
        seed=job.cfg.get("run.seed"),
        freeze_cap=job.cfg.get("run.freeze_cap"),
        mode=str(job.get("mode")),
        num_cpus=job.cfg.get("run.jobs"),
    )
    io.write(summary, job.out)
    job.written(job.out)
    if job.get("summary"):
        summary_file = str(job.get("summary"))
        io.write(summary, summary_file)
        job.written(summary_file)
    print(
        "cluster counts {} over {} trials, consensus fraction {:.3f}".format(
            summary.histogram, summary.trials, summary.consensus_fraction
        )
    )
    return const.EXIT_OK


def random_rational_profile(rng: np.random.Generator, n: int) -> Profile:
    """Sorted opinions p/q on [0, 4] with a random small denominator q."""
    denominator = int(rng.integers(1, 9))
    numerators = np.sort(rng.integers(0, 4 * denominator + 1, size=n))
    return from_values(
        [Fraction(int(p), denominator) for p in numerators], mode="rational"
    )


def oracle_check(
    n_max: int, trials: int, seed: int
) -> Tuple[List[Dict[str, Any]], int]:
    """Compare the fast update with the naive one on random rational profiles, and
    the closed forms of the first two updates with the simulator.

    Returns
    -------
        disagreements found, number of comparisons made
    """
    if n_max < 2:
        raise DomainError("--n-max must be at least 2")
    rng = np.random.default_rng(seed)
    disagreements = []
    compared = 0
    for trial in range(trials):
        f = random_rational_profile(rng, int(rng.integers(2, n_max + 1)))
        compared += 1
        if not update(f).equals(update_naive(f)):
            disagreements.append({"check": "fast_vs_naive", "trial": trial, "n": f.n})
    for n in range(5, min(n_max, ORACLE_CLOSED_FORM_N_MAX) + 1, 2):
        for length in ORACLE_LENGTHS:
            state = equally_spaced(n, length, mode="rational")
            for t in (1, 2):
                state = update(state)
                compared += 1
                if state.as_fractions() != closed_form_profile(n, length, t):
                    disagreements.append(
                        {"check": "closed_form", "n": n, "L": str(length), "t": t}
                    )
    return disagreements, compared


def _oracle_check(job: _Run) -> int:
    seed = job.cfg.get("run.seed")
    disagreements, compared = oracle_check(
        int(job.get("n_max")), int(job.get("trials")), int(seed)
    )
    report = {
        "n_max": int(job.get("n_max")),
        "trials": int(job.get("trials")),
        "seed": int(seed),
        "comparisons": compared,
        "disagreements": disagreements,
    }
    io.write(report, job.out)
    job.written(job.out)
    print("{} comparisons, {} disagreements".format(compared, len(disagreements)))
    return const.EXIT_CODES[const.REFUTED] if disagreements else const.EXIT_OK


COMMANDS: Dict[str, Callable[[_Run], int]] = {
    "simulate": _simulate,
    "certify-grid": _certify_grid,
    "certify-l6": _certify_l6,
    "sample": _sample,
    "oracle-check": _oracle_check,
}


def _execute(
    command: str,
    args: argparse.Namespace,
    argv: List[str],
    file_values: Optional[Dict[str, Any]] = None,
) -> Tuple[int, RunManifest]:
    from hkverify import __version__

    cfg = _resolve(command, args, file_values)
    config.apply_settings(cfg)
    if args.progress:
        settings.PROGRESSBAR_DISABLED = False
    job = _Run(command, cfg)
    LOGGER.info("%s with %s", command, cfg)
    start = time.perf_counter()
    try:
        status = COMMANDS[command](job)
    finally:
        close_pool()
    manifest = RunManifest.for_outputs(
        command,
        argv,
        cfg,
        job.arith(),
        __version__,
        time.perf_counter() - start,
        job.outputs,
    )
    io.write(manifest, manifest_name(job.out))
    return status, manifest


def _replay(manifest_file: str) -> int:
    recorded = io.read(manifest_file, typename="RunManifest")
    LOGGER.info("replaying %s", recorded)
    parser = build_parser()
    args = parser.parse_args([recorded.subcommand] + list(recorded.argv))
    status, _ = _execute(
        recorded.subcommand, args, list(recorded.argv), dict(recorded.config)
    )
    problems = recorded.mismatches(os.path.dirname(os.path.abspath(manifest_file)))
    for name, problem in sorted(problems.items()):
        print("  {}: {}".format(name, problem))
    if problems and recorded.arith.get("mode") == "rational":
        return const.EXIT_ERROR
    print("replayed {}: exit status {}".format(recorded.subcommand, status))
    return status


def run(argv: Optional[List[str]] = None) -> int:
    """Run the command line with `argv` (default: sys.argv[1:]) and return the exit
    status."""
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(args.verbose if args.command else 0)
        if args.command is None:
            parser.print_help()
            return const.EXIT_ERROR
        if args.command == "replay":
            return _replay(args.manifest)
        status, _ = _execute(args.command, args, argv[1:])
        return status
    except UsageError as error:
        print(error, file=sys.stderr)
    except (DomainError, ResourceError, CertificationFailure, OSError) as error:
        print("hkverify: {}".format(error), file=sys.stderr)
    return const.EXIT_ERROR


def main() -> None:
    sys.exit(run())
