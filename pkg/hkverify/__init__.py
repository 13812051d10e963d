# hkverify: certified bounded-confidence opinion dynamics in Python
#
# This file is part of hkverify: certified simulation and consensus verification
# for bounded-confidence opinion dynamics.
#
#     Copyright (c) 2024 and later, the hkverify developers
#     All rights reserved.
#
#     This source code is licensed under the BSD-style license found in the
#     LICENSE file in the root directory of this source tree.
"""hkverify simulates the Hegselmann-Krause bounded-confidence model on discrete
opinion profiles, in exact rational, outward-rounded ball or plain float
arithmetic. It propagates rigorous deviation envelopes that cover all regular
refinements of a profile, and certifies consensus of the continuum limit by
symmetric-center, grid-interval and microcluster criteria. Monte-Carlo tools
estimate cluster-count statistics for random initial opinions."""
#######################################################################################


import warnings

from hkverify import settings

# core
from hkverify.core.certify import (
    Certificate,
    certify_grid_interval,
    certify_microcluster,
    certify_symmetric_center,
    check_6tocons,
    theory_constants,
    theory_constants_sequence,
)
from hkverify.core.closed_forms import closed_form_profile, closed_form_update
from hkverify.core.deviation import (
    DeviationEnvelope,
    arrow_sets,
    envelope_evolve,
    ghost_bound,
    propagate,
)
from hkverify.core.errors import CertificationFailure, DomainError, ResourceError
from hkverify.core.manifest import RunManifest
from hkverify.core.numerics import get_context
from hkverify.core.partition import GoodPartition, find_good_partition
from hkverify.core.profile import (
    Profile,
    clusters,
    coarsen,
    diameter,
    equally_spaced,
    from_values,
    is_symmetric,
    random_refinement,
    refine,
    refine_canonical,
    translate,
    uniform_random,
)
from hkverify.core.stochastic import (
    McSummary,
    consensus_rate,
    sample_uniform_profile,
    sup_distance,
)
from hkverify.core.storage import EnvelopeTrace, Trajectory
from hkverify.core.update import evolve, is_frozen, neighborhoods, update, update_naive

# file IO
from hkverify.io_utils.fileio import read, write

# for showing hkverify info
from hkverify.utils.misc import about

# version
try:
    from hkverify.version import version as __version__
except ImportError:
    __version__ = "???"
    warnings.warn(
        "hkverify: missing version information - did hkverify install correctly?",
        ImportWarning,
    )
