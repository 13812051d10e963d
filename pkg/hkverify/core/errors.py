# errors.py
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


class DomainError(ValueError):
    """Raised for arguments outside the domain of an operation, e.g. fewer than two
    agents, mismatched profile sizes, or a divisor enclosure containing zero."""


class ResourceError(RuntimeError):
    """Raised when a computation would exceed a configured resource cap, e.g. the
    rational denominator bit size or the ambiguity enumeration limit."""


class CertificationFailure(ArithmeticError):
    """Raised when a bound required for certification cannot be established, for
    instance when an envelope grows so wide that an agent may lose all neighbours."""
