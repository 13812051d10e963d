# typedefs.py
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

from fractions import Fraction
from typing import (
    TYPE_CHECKING,
    Any,
    Callable,
    Iterable,
    List,
    Optional,
    Tuple,
    Union,
)

from typing_extensions import Literal

if TYPE_CHECKING:
    from hkverify.core.deviation import DeviationEnvelope
    from hkverify.core.profile import Profile

# raw scalar of an arithmetic context: Fraction, mpmath ivmpf or float
BoundScalar = Union[Fraction, float, Any]

# anything convertible into a BoundScalar (ints, floats, literals, (lo, hi) pairs)
ScalarLike = Union[int, float, str, Fraction, Tuple[Any, Any], Any]

ArithMode = Literal["rational", "ball", "float"]
VerdictName = Literal["Certified", "Inconclusive", "Refuted"]

# 1-based inclusive index interval (first, last); empty intervals have last < first
IndexInterval = Tuple[int, int]

IndexList = List[int]

StopCriterion = Optional[Callable[[int, "Profile", "DeviationEnvelope"], bool]]

MapMethod = Callable[..., Iterable[Any]]
