# fileio_serializers.py
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
Serializable mix-in for the file types of hkverify.

Tabular types (profiles, trajectories, envelope traces, Monte-Carlo summaries)
override `serialize` and ship one `table` array. Record types (certificates, run
manifests) are stored through their `__init__` parameters, which must be
JSON-ready: strings, numbers, booleans, None, and containers of those.
"""

import inspect

from numbers import Number
from typing import TYPE_CHECKING, Any, Dict, List

import numpy as np

from typing_extensions import Protocol, runtime_checkable

from hkverify.core.errors import DomainError

if TYPE_CHECKING:
    from hkverify.io_utils.fileio import IOData


SERIALIZABLE_REGISTRY: Dict[str, type] = {}


@runtime_checkable
class Serializable(Protocol):
    """Mix-in class that makes descendant classes serializable."""

    def __new__(cls: Any, *args, **kwargs) -> "Serializable":
        """Record the `__init__` parameters, which are what a record type stores."""
        cls._init_params = get_init_params(cls)
        return super().__new__(cls)

    def __init_subclass__(cls) -> None:
        """Register non-abstract subclasses by name, so that files can name the type
        to rebuild."""
        super().__init_subclass__()
        if not inspect.isabstract(cls):
            SERIALIZABLE_REGISTRY[cls.__name__] = cls

    @classmethod
    def deserialize(cls, io_data: "IOData") -> "Serializable":
        return cls(**io_data.as_kwargs())

    def serialize(self) -> "IOData":
        from hkverify.io_utils.fileio import IOData

        record = {name: getattr(self, name) for name in self._init_params}
        for name, value in record.items():
            check_record_value(value, "{}.{}".format(type(self).__name__, name))
        return IOData(type(self).__name__, record, None)

    def filewrite(self, filename: str) -> None:
        """Write to `filename`; the suffix selects the format."""
        import hkverify.io_utils.fileio as io

        io.write(self, filename)

    @classmethod
    def create_from_file(cls, filename: str) -> object:
        """New instance built from the data in `filename`."""
        import hkverify.io_utils.fileio as io

        return io.read(filename, typename=cls.__name__)


def check_record_value(value: Any, where: str) -> None:
    """Raise DomainError unless `value` can be written to a JSON record unchanged."""
    if value is None or isinstance(value, (str, bool, Number, np.generic)):
        return
    if isinstance(value, (list, tuple, set, frozenset, np.ndarray)):
        for index, item in enumerate(value):
            check_record_value(item, "{}[{}]".format(where, index))
        return
    if isinstance(value, dict):
        for key, item in value.items():
            check_record_value(item, "{}.{}".format(where, key))
        return
    raise DomainError(
        "{} holds a {}, which a JSON record cannot store".format(
            where, type(value).__name__
        )
    )


def dict_deserialize(iodata: "IOData") -> Dict[str, Any]:
    """JSON documents without a type key read back as plain dicts."""
    return dict(**iodata.as_kwargs())


def table_deserialize(iodata: "IOData") -> "IOData":
    """CSV tables of no registered type stay IOData."""
    return iodata


def get_init_params(obj: type) -> List[str]:
    """Names of the `__init__` parameters of class `obj`."""
    signature = inspect.signature(obj.__init__)  # type: ignore
    return [
        name
        for name, parameter in signature.parameters.items()
        if name != "self" and parameter.kind is not parameter.VAR_KEYWORD
    ]
