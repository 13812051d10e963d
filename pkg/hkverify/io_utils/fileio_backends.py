# fileio_backends.py
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
CSV and JSON backends. CSV files hold one table whose header names the type; JSON
files hold attributes at top level and arrays under a reserved key.
"""

import csv
import json

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Dict, List

import numpy as np

import hkverify.core.constants as const
import hkverify.io_utils.fileio as io

from hkverify.core.errors import DomainError

# CSV header -> registered type
CSV_TYPES = {
    tuple(const.PROFILE_HEADER): "Profile",
    tuple(const.TRAJECTORY_HEADER): "Trajectory",
    tuple(const.ENVELOPE_HEADER): "EnvelopeTrace",
    tuple(const.TRIALS_HEADER): "McSummary",
}

# reserved JSON keys
TYPE_KEY = "__type"
NDARRAYS_KEY = "__ndarrays"


class IOWriter(ABC):
    """
    ABC for writing class instance data to file.

    Parameters
    ----------
    filename: str
    """

    def __init__(self, filename: str) -> None:
        self.filename = filename
        self.io_data: io.IOData

    @abstractmethod
    def to_file(self, io_data: io.IOData, **kwargs):
        pass


class CSVWriter(IOWriter):
    """Writes the `table` array of tabular IOData below the header given by the
    `columns` attribute. Further attributes are not stored."""

    def write_table(self, header: List[str], rows: List[List[str]]) -> None:
        with open(self.filename, mode="w", newline="") as table_file:
            file_writer = csv.writer(table_file, delimiter=",", lineterminator="\n")
            file_writer.writerow(header)
            for row in rows:
                file_writer.writerow([str(entry) for entry in row])

    def to_file(self, io_data: io.IOData, **kwargs) -> None:
        self.io_data = io_data
        if "columns" not in io_data.attributes or "table" not in io_data.ndarrays:
            raise DomainError(
                "{} data is not tabular and cannot be written as CSV".format(
                    io_data.typename
                )
            )
        header = list(io_data.attributes["columns"])
        self.write_table(header, io_data.ndarrays["table"])


class CSVReader:
    @staticmethod
    def read_rows(filename: str) -> List[List[str]]:
        with open(filename, mode="r", newline="") as table_file:
            return [row for row in csv.reader(table_file, delimiter=",") if row]

    def from_file(self, filename: str, **kwargs) -> io.IOData:
        """
        Returns
        -------
            IOData with the header as `columns` attribute and the rows as `table`
        """
        rows = self.read_rows(filename)
        if not rows:
            raise DomainError("'{}' holds no CSV header".format(filename))
        header = [entry.strip() for entry in rows[0]]
        table = np.empty((len(rows) - 1, len(header)), dtype=object)
        for index, row in enumerate(rows[1:]):
            if len(row) != len(header):
                raise DomainError(
                    "'{}' row {}: expected {} fields, got {}".format(
                        filename, index + 2, len(header), len(row)
                    )
                )
            table[index] = [entry.strip() for entry in row]
        typename = CSV_TYPES.get(tuple(header), "table")
        return io.IOData(typename, {"columns": header}, {"table": table})


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError("cannot write {} to JSON".format(type(value).__name__))


class JSONWriter(IOWriter):
    """Writes IOData as one JSON document with sorted keys, so that equal data gives
    identical bytes."""

    @staticmethod
    def payload(io_data: io.IOData) -> Dict[str, Any]:
        document = {TYPE_KEY: io_data.typename}
        document.update(io_data.attributes)
        if io_data.ndarrays:
            document[NDARRAYS_KEY] = {
                name: np.asarray(array).tolist()
                for name, array in io_data.ndarrays.items()
            }
        return document

    def to_file(self, io_data: io.IOData, **kwargs) -> None:
        self.io_data = io_data
        with open(self.filename, mode="w") as json_file:
            json.dump(
                self.payload(io_data),
                json_file,
                sort_keys=True,
                indent=2,
                default=_jsonable,
            )
            json_file.write("\n")


class JSONReader:
    @staticmethod
    def from_payload(document: Dict[str, Any]) -> io.IOData:
        document = dict(document)
        typename = document.pop(TYPE_KEY, "dict")
        ndarrays = {
            name: np.asarray(values, dtype=object)
            for name, values in document.pop(NDARRAYS_KEY, {}).items()
        }
        return io.IOData(typename, document, ndarrays)

    def from_file(self, filename: str, **kwargs) -> io.IOData:
        with open(filename, mode="r") as json_file:
            document = json.load(json_file)
        if not isinstance(document, dict):
            raise DomainError("'{}' does not hold a JSON object".format(filename))
        return self.from_payload(document)
