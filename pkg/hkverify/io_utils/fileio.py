# fileio.py
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
Helper routines for writing data to files and reading it back.
"""

import os

from typing import TYPE_CHECKING, Any, Dict, List, Optional, Union

from numpy import ndarray

import hkverify.core.constants as const
import hkverify.io_utils.fileio_serializers as io_serializers

from hkverify.core.errors import DomainError

if TYPE_CHECKING:
    from hkverify.io_utils.fileio_backends import (
        CSVReader,
        CSVWriter,
        JSONReader,
        JSONWriter,
    )
    from hkverify.io_utils.fileio_serializers import Serializable


class IOData:
    """
    Class for processing input/output data
    """

    def __init__(
        self,
        typename: str,
        attributes: Union[Dict[str, Any], None],
        ndarrays: Union[Dict[str, ndarray], None],
    ) -> None:
        self.typename = typename
        self.attributes = attributes or {}
        self.ndarrays = ndarrays or {}

    def as_kwargs(self) -> Dict[str, Any]:
        """Attributes and arrays joined, as passed to `__init__`."""
        return {**self.attributes, **self.ndarrays}


def serialize(the_object: "Serializable") -> IOData:
    """IOData of a Serializable hkverify object, ready for a writer backend."""
    if not isinstance(the_object, io_serializers.Serializable):
        raise DomainError("cannot write a {} to file".format(type(the_object).__name__))
    return the_object.serialize()


def deserialize(iodata: IOData) -> Any:
    """
    Turn IOData back into a Python object of the appropriate kind.
    An object is deemed deserializable if
    1) it is recorded in SERIALIZABLE_REGISTRY and has a `.deserialize` method
    2) there exists a function `fileio_serializers.<typename>_deserialize`
    """
    typename = iodata.typename
    if typename in io_serializers.SERIALIZABLE_REGISTRY:
        cls = io_serializers.SERIALIZABLE_REGISTRY[typename]
        return cls.deserialize(iodata)

    if hasattr(io_serializers, typename + "_deserialize"):
        deserialize_method = getattr(io_serializers, typename + "_deserialize")
        return deserialize_method(iodata)

    raise NotImplementedError(
        "No implementation for converting {} data to Python object.".format(typename)
    )


def write(the_object: Any, filename: str) -> None:
    """
    Write `the_object` to a file with name `filename`; the suffix selects the
    format.

    Parameters
    ----------
    the_object:
        object to be written
    filename:
        name of file to be written, ending in .csv or .json
    """
    iodata = serialize(the_object)
    writer = IO.get_writer(filename)
    writer.to_file(iodata)


def read(filename: str, typename: Optional[str] = None) -> Any:
    """
    Read a Serializable object from file.

    Parameters
    ----------
    filename:
        name of file to be read
    typename:
        type to build; for CSV files it is otherwise inferred from the header

    Returns
    -------
        class instance initialized with the data from the file
    """
    reader = IO.get_reader(filename)
    iodata = reader.from_file(filename)
    if typename is not None:
        iodata.typename = typename
    return deserialize(iodata)


def write_table(filename: str, header: List[str], rows: List[List[str]]) -> None:
    """Write a plain CSV table, e.g. per-step statistics."""
    from hkverify.io_utils.fileio_backends import CSVWriter

    CSVWriter(filename).write_table(header, rows)


def read_table(filename: str) -> IOData:
    """Read a CSV table without deserializing it."""
    from hkverify.io_utils.fileio_backends import CSVReader

    return CSVReader().from_file(filename)


class FileIOFactory:
    """Factory method for choosing reader/writer according to given format"""

    @staticmethod
    def _suffix(file_name: str) -> str:
        _, suffix = os.path.splitext(file_name)
        if suffix not in const.FILE_TYPES:
            raise DomainError(
                "Extension '{}' of given file name '{}' does not match any supported "
                "file type: {}".format(suffix, file_name, const.FILE_TYPES)
            )
        return suffix

    def get_writer(self, file_name: str) -> Union["CSVWriter", "JSONWriter"]:
        """
        Based on the extension of the provided file name, return the appropriate
        writer engine.
        """
        import hkverify.io_utils.fileio_backends as io_backends

        if self._suffix(file_name) == ".csv":
            return io_backends.CSVWriter(file_name)
        return io_backends.JSONWriter(file_name)

    def get_reader(self, file_name: str) -> Union["CSVReader", "JSONReader"]:
        """
        Based on the extension of the provided file name, return the appropriate
        reader engine.
        """
        import hkverify.io_utils.fileio_backends as io_backends

        if self._suffix(file_name) == ".csv":
            return io_backends.CSVReader()
        return io_backends.JSONReader()


IO = FileIOFactory()
