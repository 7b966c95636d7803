"""Measure files and CSV grids.

A measure file is a UTF-8 JSON object::

    {"a": 0.5, "atoms": [-1.0, 1.0], "weights": [0.5, 0.5]}

``a`` is optional; when present the file describes NevanlinnaData.  Floats
are written with ``repr`` so reading back a written file is bit-exact.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import IO, Iterable, Union

from .core import DiscreteMeasure, NevanlinnaData, make_measure
from .errors import InvalidMeasure

MeasureLike = Union[DiscreteMeasure, NevanlinnaData]


class MeasureFileError(InvalidMeasure):
    pass


def to_dict(obj: MeasureLike) -> dict:
    if isinstance(obj, NevanlinnaData):
        return {"a": obj.a, "atoms": list(obj.rho.atoms), "weights": list(obj.rho.weights)}
    return {"atoms": list(obj.atoms), "weights": list(obj.weights)}


def from_dict(doc: dict) -> MeasureLike:
    if not isinstance(doc, dict) or "atoms" not in doc or "weights" not in doc:
        raise MeasureFileError("measure file needs 'atoms' and 'weights'")
    extra = set(doc) - {"a", "atoms", "weights"}
    if extra:
        raise MeasureFileError(f"unknown keys {sorted(extra)}")
    try:
        measure = make_measure(doc["atoms"], doc["weights"])
    except (TypeError, ValueError) as exc:
        raise MeasureFileError(str(exc)) from exc
    if "a" in doc:
        a = doc["a"]
        if isinstance(a, bool) or not isinstance(a, (int, float)):
            raise MeasureFileError("'a' must be a number")
        return NevanlinnaData(float(a), measure)
    return measure


def dumps(obj: MeasureLike) -> str:
    return json.dumps(to_dict(obj), indent=2) + "\n"


def loads(text: str) -> MeasureLike:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureFileError(f"invalid JSON: {exc}") from exc
    return from_dict(doc)


def read_measure(path: str | Path) -> MeasureLike:
    return loads(Path(path).read_text(encoding="utf-8"))


def write_measure(obj: MeasureLike, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def format_float(x: float) -> str:
    x = float(x)
    if x == 0:
        return "0"
    return f"{x:.17g}"


def write_csv(rows: Iterable[tuple[float, complex]], out: IO[str], header: str = "t") -> None:
    out.write(f"{header},re,im\n")
    for t, v in rows:
        v = complex(v)
        out.write(f"{format_float(t)},{format_float(v.real)},{format_float(v.imag)}\n")


def read_csv(path: str | Path) -> tuple[list[float], list[complex]]:
    """Read ``t,re,im`` rows (header optional)."""
    pts, vals = [], []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise MeasureFileError(f"line {lineno}: expected 3 columns")
        try:
            t, re, im = (float(p) for p in parts)
        except ValueError:
            if lineno == 1:
                continue
            raise MeasureFileError(f"line {lineno}: not numeric") from None
        if not all(math.isfinite(x) for x in (t, re, im)):
            raise MeasureFileError(f"line {lineno}: non-finite value")
        pts.append(t)
        vals.append(complex(re, im))
    return pts, vals
