# This file is part of hkverify: certified simulation and consensus verification
# for bounded-confidence opinion dynamics.
#
#     Copyright (c) 2024 and later, the hkverify developers
#     All rights reserved.
#
#     This source code is licensed under the BSD-style license found in the
#     LICENSE file in the root directory of this source tree.
"""hkverify.utils contains utility modules for configuration, parallel processing,
progress display, plotting and type definitions."""
########################################################################################
