"""Read user data from delimited text files."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from ..core import Dataset, ResClusterError


class IngestError(ResClusterError, ValueError):
    pass


class EmptyFile(IngestError):
    pass


class ParseError(IngestError):
    def __init__(self, line: int, token: str):
        super().__init__(f"line {line}: cannot parse {token!r} as a number")
        self.line = line


class RaggedRows(IngestError):
    def __init__(self, line: int, got: int, expected: int):
        super().__init__(f"line {line}: expected {expected} fields, found {got}")
        self.line = line


def ingest_csv(path, delimiter: str = ",", has_header: bool = False) -> Dataset:
    """Load a rectangular numeric table; line numbers in errors are 1-based."""
    rows, width = [], None
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        for line_no, fields in enumerate(reader, start=1):
            if has_header and line_no == 1:
                continue
            if not fields or all(not f.strip() for f in fields):
                continue
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise RaggedRows(line_no, len(fields), width)
            row = []
            for tok in fields:
                try:
                    val = float(tok)
                except ValueError:
                    raise ParseError(line_no, tok.strip()) from None
                if not math.isfinite(val):
                    raise ParseError(line_no, tok.strip())
                row.append(val)
            rows.append(row)
    if not rows:
        raise EmptyFile(f"{path} contains no data rows")
    return Dataset(rows)
