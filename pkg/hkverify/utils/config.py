# config.py
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
Run configuration: INI files with sections such as [arith], [run] and one section
per subcommand, flattened to `section.key`. Later sources override earlier ones:
built-in defaults, config file, environment, command-line flags.
"""

import configparser
import logging
import os

from typing import Any, Dict, Mapping, Optional

import hkverify.settings as settings

from hkverify.core.errors import DomainError
from hkverify.utils.misc import parse_setting

LOGGER = logging.getLogger(__name__)

# config key -> attribute of hkverify.settings
SETTINGS_KEYS = {
    "arith.mode": "ARITH_MODE",
    "arith.precision_bits": "PRECISION_BITS",
    "arith.max_denominator_bits": "MAX_DENOMINATOR_BITS",
    "run.jobs": "NUM_CPUS",
    "run.multiproc": "MULTIPROC",
    "run.freeze_cap": "FREEZE_CAP",
    "run.seed": "SEED",
}

SECTIONS = ("arith", "run", "grid", "l6", "sample", "simulate", "oracle")

ENV_JOBS = "HK_JOBS"


def defaults() -> Dict[str, Any]:
    """Current values of the configurable settings."""
    return {key: getattr(settings, name) for key, name in SETTINGS_KEYS.items()}


def load_config(filename: str) -> Dict[str, Any]:
    """Read an INI file into a flat dict keyed by `section.key`.

    Raises
    ------
    DomainError
        if the file is missing, malformed or has unknown sections
    """
    if not os.path.isfile(filename):
        raise DomainError("config file '{}' not found".format(filename))
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read(filename)
    except configparser.Error as error:
        raise DomainError("malformed config file '{}': {}".format(filename, error))
    flat = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise DomainError(
                "unknown section [{}] in '{}'; expected one of {}".format(
                    section, filename, ", ".join(SECTIONS)
                )
            )
        for key, text in parser.items(section):
            flat["{}.{}".format(section, key)] = parse_setting(text)
    LOGGER.debug("read %d config entries from %s", len(flat), filename)
    return flat


def from_environment(environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    environ = os.environ if environ is None else environ
    jobs = environ.get(ENV_JOBS)
    if not jobs:
        return {}
    try:
        return {"run.jobs": int(jobs)}
    except ValueError:
        raise DomainError("{} must be an integer, got '{}'".format(ENV_JOBS, jobs))


def resolve(
    file_values: Optional[Mapping[str, Any]] = None,
    flag_values: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> Dict[str, Any]:
    """Merge configuration sources by precedence: defaults < file < environment <
    flags. Flags given as None are ignored."""
    config = defaults()
    config.update(file_values or {})
    config.update(from_environment(environ))
    config.update(
        {key: value for key, value in (flag_values or {}).items() if value is not None}
    )
    return dict(sorted(config.items()))


def apply_settings(config: Mapping[str, Any]) -> None:
    """Assign the settings attributes named by the resolved configuration."""
    for key, name in SETTINGS_KEYS.items():
        if key in config and config[key] is not None:
            setattr(settings, name, config[key])
    if settings.ARITH_MODE not in ("rational", "ball", "float"):
        raise DomainError("unknown arithmetic mode '{}'".format(settings.ARITH_MODE))
