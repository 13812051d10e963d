# constants.py
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

# supported file types
FILE_TYPES = [".csv", ".json"]

# verdicts and the CLI exit status reporting them
CERTIFIED = "Certified"
INCONCLUSIVE = "Inconclusive"
REFUTED = "Refuted"

EXIT_CODES = {CERTIFIED: 0, INCONCLUSIVE: 2, REFUTED: 3}
EXIT_OK = 0
EXIT_ERROR = 1

# criteria recorded in certificates
CRITERION_SYMMETRIC_CENTER = "symmetric_center"
CRITERION_GRID = "grid_interval"
CRITERION_SIX_TO_CONSENSUS = "six_to_consensus"
CRITERION_MICROCLUSTER = "microcluster"

# CSV headers
PROFILE_HEADER = ["index", "opinion_lo", "opinion_hi"]
TRAJECTORY_HEADER = ["t", "i", "opinion_lo", "opinion_hi"]
ENVELOPE_HEADER = ["t", "i", "e_l", "e_r"]
STATS_HEADER = ["t", "diameter_lo", "diameter_hi", "clusters", "min_lo", "max_hi"]
TRIALS_HEADER = ["trial", "clusters", "freeze_t", "diameter_final"]
