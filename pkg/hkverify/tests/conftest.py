# conftest.py  ---  for use with pytest
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


import os
import warnings

import pytest

import hkverify
import hkverify.settings as settings

from hkverify.core.numerics import get_context
from hkverify.settings import IN_IPYTHON

try:
    import matplotlib
except ImportError:
    matplotlib = None

if matplotlib is not None and not IN_IPYTHON:
    matplotlib.use("Agg")

warnings.filterwarnings(
    action="ignore",
    category=FutureWarning,
)

TESTDIR, _ = os.path.split(hkverify.__file__)
TESTDIR = os.path.join(TESTDIR, "tests", "")

# settings that tests (and the command line) may change
RESTORED_SETTINGS = (
    "ARITH_MODE",
    "PRECISION_BITS",
    "MAX_DENOMINATOR_BITS",
    "NUM_CPUS",
    "MULTIPROC",
    "FREEZE_CAP",
    "SEED",
    "PROGRESSBAR_DISABLED",
)


def pytest_addoption(parser):
    # This is to allow multi-processing tests by adding --num_cpus 2 to pytest calls
    parser.addoption(
        "--num_cpus", action="store", default=1, help="number of cores to be used"
    )
    parser.addoption(
        "--io_type",
        action="store",
        default="json",
        help="file type used for round trips of JSON-capable objects",
    )
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run the large reproduction tests",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: large reproduction run, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def num_cpus(pytestconfig):
    return int(pytestconfig.getoption("num_cpus"))


@pytest.fixture(scope="session")
def io_type(pytestconfig):
    return pytestconfig.getoption("io_type")


@pytest.fixture(autouse=True)
def restore_settings():
    """Undo changes to hkverify.settings made by a test."""
    saved = {name: getattr(settings, name) for name in RESTORED_SETTINGS}
    yield
    for name, value in saved.items():
        setattr(settings, name, value)


@pytest.fixture(params=["rational", "ball"])
def certified_ctx(request):
    return get_context(request.param)


@pytest.mark.usefixtures("num_cpus", "io_type")
class BaseTest:
    """Base class for tests that write files."""

    @pytest.fixture(autouse=True)
    def set_tmpdir(self, request):
        """Pytest fixture that provides a temporary directory for writing test files"""
        setattr(self, "tmpdir", str(request.getfixturevalue("tmpdir")))

    def path(self, filename: str) -> str:
        return os.path.join(self.tmpdir, filename)
