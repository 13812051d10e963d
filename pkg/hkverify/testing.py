# testing.py
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

import pytest

from hkverify.tests.conftest import TESTDIR


def run(runslow: bool = False):
    """
    Run the pytest scripts for hkverify.
    """
    # runs tests in hkverify.tests directory
    arguments = ["-v", TESTDIR]
    if runslow:
        arguments.append("--runslow")
    return pytest.main(arguments)
