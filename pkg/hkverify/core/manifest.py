# manifest.py
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

import hashlib
import logging
import os

from typing import Any, Dict, List, Optional

import hkverify.io_utils.fileio_serializers as serializers

LOGGER = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"


def file_digest(filename: str) -> str:
    """sha256 hex digest of a file's contents."""
    digest = hashlib.sha256()
    with open(filename, "rb") as stream:
        for chunk in iter(lambda: stream.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_name(output: str) -> str:
    return output + MANIFEST_SUFFIX


class RunManifest(serializers.Serializable):
    """Record of one command-line run, enough to replay it.

    Parameters
    ----------
    subcommand:
        name of the subcommand
    argv:
        arguments after the subcommand, as given
    config:
        fully resolved configuration, flattened to section.key
    arith:
        arithmetic mode and precision used
    version:
        hkverify version
    duration:
        wall-clock seconds
    digests:
        sha256 digest per output file
    """

    def __init__(
        self,
        subcommand: str,
        argv: List[str],
        config: Dict[str, Any],
        arith: Dict[str, Any],
        version: str,
        duration: float,
        digests: Dict[str, str],
    ) -> None:
        self.subcommand = subcommand
        self.argv = list(argv)
        self.config = dict(config)
        self.arith = dict(arith)
        self.version = version
        self.duration = float(duration)
        self.digests = dict(digests)

    @classmethod
    def for_outputs(
        cls,
        subcommand: str,
        argv: List[str],
        config: Dict[str, Any],
        arith: Dict[str, Any],
        version: str,
        duration: float,
        outputs: List[str],
    ) -> "RunManifest":
        digests = {
            os.path.basename(name): file_digest(name)
            for name in outputs
            if os.path.isfile(name)
        }
        return cls(subcommand, argv, config, arith, version, duration, digests)

    def mismatches(self, directory: Optional[str] = None) -> Dict[str, str]:
        """Output files whose current digest differs from the recorded one, with
        the reason."""
        problems = {}
        for name, recorded in self.digests.items():
            path = name if directory is None else os.path.join(directory, name)
            if not os.path.isfile(path):
                problems[name] = "missing"
            elif file_digest(path) != recorded:
                problems[name] = "digest differs"
        return problems

    def __repr__(self) -> str:
        return "RunManifest({}, outputs={})".format(
            self.subcommand, sorted(self.digests)
        )
