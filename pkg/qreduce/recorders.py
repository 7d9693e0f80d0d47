import csv
import json
import math
import os
import sys
from fractions import Fraction
from functools import lru_cache

import numpy as np
import jsonschema

from typing import Any, Dict, Optional, Sequence, TextIO

from .streams import Stream

import logging

_LOGGER = logging.getLogger(__name__)

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), 'schemas')

# significant digits of the emitted tables
ANALYTIC_DIGITS = 12
KRAWTCHOUK_DIGITS = 15


def format_value(value, digits: int) -> str:
    """Decimal string of a table cell."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating, Fraction)):
        return f'{float(value):.{digits}g}'
    return str(value)


class CsvRecorder:
    """Writes the rows of a table to a CSV file, header first."""

    def __init__(self, digits: int = ANALYTIC_DIGITS):
        self.digits = digits
        self.recording = False
        self._file = None
        self._writer = None
        self._first_line = False

    def start(self, path: Optional[str], overwrite: bool = False):
        """Open the output; a None path writes to stdout."""
        if self.recording:
            raise ValueError("Already recording.")

        if path is not None and os.path.exists(path):
            if not overwrite:
                raise FileExistsError(
                    f'{path} already exists. Use overwrite=True to overwrite it.')

        self.recording = True
        self._file = sys.stdout if path is None else open(path, 'w', newline='')
        self._writer = csv.writer(self._file, lineterminator='\n')
        self._first_line = True

    def stop(self):
        if not self.recording:
            raise ValueError("Start recorder first!")

        self.recording = False

        if self._file is not sys.stdout:
            self._file.close()
        self._file = None

        self._writer = None

    def feed_header(self, header: Sequence[str]):
        if not self.recording:
            raise ValueError('Start recorder first!')
        if self._first_line:
            self._writer.writerow(header)
            self._first_line = False

    def feed(self, header: Sequence[str], row: Sequence[Any]):
        """Feed one row into the recorder.

        :param header: column labels, written before the first row
        :param row: cell values
        """
        self.feed_header(header)
        self._writer.writerow([format_value(v, self.digits) for v in row])


def record(stream: Stream, path: Optional[str], overwrite: bool = False, digits: int = ANALYTIC_DIGITS) -> int:
    """Drive a stream into a CSV file and return the number of rows written."""
    recorder = CsvRecorder(digits)
    recorder.start(path, overwrite)
    count = 0
    try:
        for row in stream:
            recorder.feed(stream.header, row)
            count += 1
        if count == 0:
            recorder.feed_header(stream.header)
    finally:
        recorder.stop()
    _LOGGER.info(f'{stream.name}: {count} rows written to {path or "stdout"}')
    return count


def round_floats(value, digits: int = ANALYTIC_DIGITS):
    """Recursively round floats to a number of significant digits."""
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(f'{value:.{digits}g}')
    return value


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    with open(os.path.join(SCHEMA_DIR, f'{name}.schema.json')) as f:
        return json.load(f)


def validate(document: Dict[str, Any], schema_name: str) -> None:
    """Raise jsonschema.ValidationError if the document does not match."""
    jsonschema.validate(instance=document, schema=load_schema(schema_name))


def dumps(document: Dict[str, Any]) -> str:
    return json.dumps(round_floats(document), sort_keys=True, indent=2)


def write_json(document: Dict[str, Any], path: Optional[str], overwrite: bool = False,
               schema_name: Optional[str] = None, out: TextIO = None) -> None:
    """Write a JSON document with sorted keys, validating it first if a schema is given."""
    document = round_floats(document)
    if schema_name is not None:
        validate(document, schema_name)

    text = json.dumps(document, sort_keys=True, indent=2)
    if path is None:
        (out or sys.stdout).write(text + '\n')
        return

    if os.path.exists(path) and not overwrite:
        raise FileExistsError(f'{path} already exists. Use overwrite=True to overwrite it.')
    with open(path, 'w') as f:
        f.write(text + '\n')
    _LOGGER.info(f'JSON document written to {path}')
