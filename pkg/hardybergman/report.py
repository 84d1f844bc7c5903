"""Structured command reports: JSON on standard output, CSV for series."""

import csv
import json
import math
from collections.abc import Mapping
from enum import Enum
from numbers import Integral
from typing import Any

import attrs
import numpy as np
from attrs import field, frozen
from attrs.validators import deep_iterable, instance_of, optional
from frozendict import frozendict
from multimethod import multimethod

from hardybergman.errors import NumericError, ReportIOError

__all__ = [
    "Series",
    "Report",
    "to_json",
    "rounded",
    "render_json",
    "emit_csv",
    "DEFAULT_DIGITS",
]

DEFAULT_DIGITS = 12


def _frozen_mapping(value) -> frozendict:
    return value if isinstance(value, frozendict) else frozendict(value or {})


def _rows(rows) -> tuple[tuple, ...]:
    return tuple(tuple(row) for row in rows)


@frozen
class Series:
    columns: tuple[str, ...] = field(
        converter=tuple, validator=deep_iterable(instance_of(str))
    )
    rows: tuple[tuple, ...] = field(factory=tuple, converter=_rows)

    @rows.validator
    def _check_rows(self, attribute, rows):
        for row in rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row!r} does not match columns {self.columns!r}")


@frozen
class Report:
    command: str
    inputs: frozendict = field(factory=frozendict, converter=_frozen_mapping)
    results: frozendict = field(factory=frozendict, converter=_frozen_mapping)
    series: Series | None = field(default=None, validator=optional(instance_of(Series)))
    warnings: tuple[str, ...] = field(factory=tuple, converter=tuple)
    error: frozendict | None = field(
        default=None, converter=attrs.converters.optional(_frozen_mapping)
    )
    metadata: frozendict | None = field(
        default=None, converter=attrs.converters.optional(_frozen_mapping)
    )

    @classmethod
    def failure(
        cls, command: str, inputs: Mapping, e: NumericError, warnings=()
    ) -> "Report":
        return cls(
            command=command,
            inputs=inputs,
            warnings=warnings,
            error={"category": e.category, "message": str(e)},
        )


# to_json


@multimethod
def to_json(self: object) -> Any:
    if attrs.has(type(self)):
        return {
            a.name: to_json(getattr(self, a.name)) for a in attrs.fields(type(self))
        }
    return self


@multimethod
def to_json(self: Enum) -> Any:
    return to_json(self.value)


@multimethod
def to_json(self: float) -> Any:
    # JSON has no literal for these.
    return self if math.isfinite(self) else repr(self)


@multimethod
def to_json(self: complex) -> Any:
    return {"re": to_json(self.real), "im": to_json(self.imag)}


@multimethod
def to_json(self: np.generic) -> Any:
    return to_json(self.item())


# These also subclass the Python builtins.


@multimethod
def to_json(self: np.float64) -> Any:
    return to_json(float(self))


@multimethod
def to_json(self: np.complex128) -> Any:
    return to_json(complex(self))


@multimethod
def to_json(self: np.ndarray) -> Any:
    return [to_json(x) for x in self.tolist()]


@multimethod
def to_json(self: list | tuple) -> Any:
    return [to_json(x) for x in self]


@multimethod
def to_json(self: Mapping) -> Any:
    return {str(k): to_json(v) for k, v in self.items()}


@multimethod
def to_json(self: Report) -> Any:
    document = {
        "command": self.command,
        "inputs": to_json(self.inputs),
        "results": to_json(self.results),
        "series": to_json(self.series),
        "warnings": list(self.warnings),
        "error": to_json(self.error),
    }
    if self.metadata is not None:
        document["metadata"] = to_json(self.metadata)
    return document


# Rounding of JSON documents


@multimethod
def rounded(self: object, digits: int) -> Any:
    return self


@multimethod
def rounded(self: float, digits: int) -> Any:
    value = float(f"{self:.{digits}g}")
    # Avoid "-0.0" in reports.
    return value + 0.0


@multimethod
def rounded(self: list, digits: int) -> Any:
    return [rounded(x, digits) for x in self]


@multimethod
def rounded(self: dict, digits: int) -> Any:
    return {k: rounded(v, digits) for k, v in self.items()}


def render_json(report: Report, digits: int = DEFAULT_DIGITS) -> str:
    document = rounded(to_json(report), digits)
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


# CSV


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (Integral, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def emit_csv(series: Series, path) -> None:
    """Header row plus one line per row; floats carry 17 significant digits."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(series.columns)
            writer.writerows([_csv_cell(value) for value in row] for row in series.rows)
    except OSError as e:
        raise ReportIOError(
            f"cannot write CSV: {e.strerror or e}", path=str(path)
        ) from e
