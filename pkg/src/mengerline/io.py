"""File formats: point CSV, matrix JSON, and deterministic report output.

CSV carries coordinate sources: header columns x,y (or x0,x1,... in higher
dimension) plus an optional trailing weight column.  JSON carries either
{"coords": [[...]...]} or a full distance matrix {"dist": [[...]...]}, with
an optional "weights" array.  Reports are serialized with sorted keys so
identical runs produce identical bytes.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError
from .metric import FiniteMetricSpace, Measure

__all__ = [
    "read_dataset",
    "write_points_csv",
    "write_matrix_json",
    "dump_report",
    "report_bytes",
]


def _parse_float(text: str, line: int, field: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"line {line}: field {field!r} is not a number: {text!r}")
    if not math.isfinite(value):
        raise InputError(f"line {line}: field {field!r} is not finite: {text!r}")
    return value


def _read_csv(path: Path) -> tuple[FiniteMetricSpace, Measure]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file")
        header = [h.strip() for h in header]
        has_weight = bool(header) and header[-1] == "weight"
        coord_names = header[:-1] if has_weight else header
        if not coord_names:
            raise InputError(f"{path}: no coordinate columns in header {header}")
        rows = []
        weights = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(
                    f"{path}: line {line_no}: expected {len(header)} fields, "
                    f"got {len(row)}")
            values = [_parse_float(c, line_no, name)
                      for name, c in zip(header, row)]
            if has_weight:
                rows.append(values[:-1])
                weights.append(values[-1])
            else:
                rows.append(values)
    if not rows:
        raise InputError(f"{path}: no data rows")
    coords = np.asarray(rows)
    space = FiniteMetricSpace.from_coords(coords)
    if has_weight:
        measure = Measure(np.asarray(weights))
    else:
        measure = Measure.uniform(space)
    return space, measure


def _read_json(path: Path) -> tuple[FiniteMetricSpace, Measure]:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}")
    if not isinstance(payload, dict):
        raise InputError(f"{path}: expected a JSON object")
    if "dist" in payload:
        space = FiniteMetricSpace.from_matrix(np.asarray(payload["dist"], dtype=float))
    elif "coords" in payload:
        space = FiniteMetricSpace.from_coords(np.asarray(payload["coords"], dtype=float))
    else:
        raise InputError(f"{path}: needs a 'dist' or 'coords' key")
    if "weights" in payload:
        weights = np.asarray(payload["weights"], dtype=float)
        if weights.shape != (space.size,):
            raise InputError(
                f"{path}: weights length {weights.shape} does not match "
                f"{space.size} points")
        measure = Measure(weights)
    else:
        measure = Measure.uniform(space)
    return space, measure


def read_dataset(path: str | Path) -> tuple[FiniteMetricSpace, Measure]:
    """Load a (space, measure) pair from a .csv or .json file.

    Files without weights get the uniform measure (diameter/n per point).
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    if path.suffix.lower() == ".csv":
        return _read_csv(path)
    if path.suffix.lower() == ".json":
        return _read_json(path)
    raise InputError(f"unsupported input extension {path.suffix!r} (use .csv or .json)")


def _coord_header(dim: int) -> list[str]:
    if dim == 2:
        return ["x", "y"]
    return [f"x{i}" for i in range(dim)]


def write_points_csv(path: str | Path | None, coords: np.ndarray,
                     weights: np.ndarray | None = None) -> None:
    """Write coordinates (and weights) as CSV; None writes to stdout."""
    coords = np.asarray(coords)
    header = _coord_header(coords.shape[1])
    if weights is not None:
        header = header + ["weight"]
    lines = [",".join(header)]
    for i in range(coords.shape[0]):
        row = [repr(float(v)) for v in coords[i]]
        if weights is not None:
            row.append(repr(float(weights[i])))
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if path is None:
        import sys
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="")


def write_matrix_json(path: str | Path | None, dist: np.ndarray,
                      weights: np.ndarray | None = None) -> None:
    payload: dict = {"dist": [[float(v) for v in row] for row in np.asarray(dist)]}
    if weights is not None:
        payload["weights"] = [float(v) for v in weights]
    if path is None:
        import sys
        sys.stdout.write(report_bytes(payload).decode())
    else:
        Path(path).write_text(report_bytes(payload).decode())


def report_bytes(report: dict) -> bytes:
    """Canonical JSON encoding: sorted keys, two-space indent, newline."""
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()


def dump_report(report: dict, out: str | Path | None) -> None:
    data = report_bytes(report)
    if out is None:
        import sys
        sys.stdout.write(data.decode())
    else:
        Path(out).write_bytes(data)
