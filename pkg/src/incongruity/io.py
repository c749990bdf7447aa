"""CSV loaders.

All files are UTF-8, comma separated, '.' decimal point, with a header row.
Errors carry the file name, line number and field name.
"""
from __future__ import annotations

import csv
import math
import re
from pathlib import Path

import numpy as np

from .core import Formula, FormulaSet, MetricDef, Modality, obs
from .errors import SchemaError
from .scenarios import DailyLog, ScaleReading, Sighting

_XCOL = re.compile(r"^x([1-9][0-9]*)$")


def _rows(path):
    path = Path(path)
    try:
        f = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot open ({exc.strerror})") from None
    with f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, a header row is required") from None
        header = [h.strip() for h in header]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise SchemaError(f"{path} line {lineno}: {len(row)} fields, header has {len(header)}")
            rows.append((lineno, dict(zip(header, (c.strip() for c in row)))))
    return path, header, rows


def _num(path, lineno, field, text) -> float:
    try:
        v = float(text)
    except ValueError:
        raise SchemaError(f"{path} line {lineno} field {field}: {text!r} is not a number") from None
    if not math.isfinite(v):
        raise SchemaError(f"{path} line {lineno} field {field}: value must be finite")
    return v


def _require(path, header, cols):
    missing = [c for c in cols if c not in header]
    if missing:
        raise SchemaError(f"{path} line 1: missing column(s) {', '.join(missing)}")


def read_dataset(path) -> tuple[np.ndarray, np.ndarray, list[Modality]]:
    """Columns ``x1..xn``, ``y`` and optionally ``mod`` (``obs:g`` / ``hyp:g``)."""
    path, header, rows = _rows(path)
    xcols = sorted((int(_XCOL.match(h).group(1)), h) for h in header if _XCOL.match(h))
    if not xcols:
        raise SchemaError(f"{path} line 1: no x1..xn columns")
    if [i for i, _ in xcols] != list(range(1, len(xcols) + 1)):
        raise SchemaError(f"{path} line 1: x columns must be x1..x{len(xcols)} without gaps")
    _require(path, header, ["y"])
    X = np.empty((len(rows), len(xcols)))
    y = np.empty(len(rows))
    mods = []
    for r, (lineno, row) in enumerate(rows):
        for c, (_, name) in enumerate(xcols):
            X[r, c] = _num(path, lineno, name, row[name])
        y[r] = _num(path, lineno, "y", row["y"])
        if "mod" in row and row["mod"]:
            try:
                mods.append(Modality.parse(row["mod"]))
            except (ValueError, SchemaError):
                raise SchemaError(f"{path} line {lineno} field mod: {row['mod']!r} is not obs:g or hyp:g") from None
        else:
            mods.append(obs())
    return X, y, mods


def read_formula_set(path) -> FormulaSet:
    X, y, mods = read_dataset(path)
    return FormulaSet(tuple(Formula(m, x, v) for m, x, v in zip(mods, X, y)), x_dim=X.shape[1])


def read_scales(path) -> list[ScaleReading]:
    path, header, rows = _rows(path)
    _require(path, header, ["scale_id", "time", "weight"])
    out = []
    for lineno, row in rows:
        sid = _num(path, lineno, "scale_id", row["scale_id"])
        if sid not in (1.0, 2.0):
            raise SchemaError(f"{path} line {lineno} field scale_id: must be 1 or 2")
        w = _num(path, lineno, "weight", row["weight"])
        if w <= 0:
            raise SchemaError(f"{path} line {lineno} field weight: must be positive")
        out.append(ScaleReading(int(sid), _num(path, lineno, "time", row["time"]), w))
    return out


def read_log(path) -> list[DailyLog]:
    path, header, rows = _rows(path)
    _require(path, header, ["day", "calories", "weight"])
    out = []
    for lineno, row in rows:
        cal = _num(path, lineno, "calories", row["calories"])
        if cal < 0:
            raise SchemaError(f"{path} line {lineno} field calories: must be non-negative")
        out.append(DailyLog(int(_num(path, lineno, "day", row["day"])), cal,
                            _num(path, lineno, "weight", row["weight"])))
    return out


def read_travel(path) -> MetricDef:
    """Square matrix; the header row names the locations."""
    path, header, rows = _rows(path)
    if len(rows) != len(header):
        raise SchemaError(f"{path}: {len(rows)} rows for {len(header)} locations, matrix must be square")
    table = [[_num(path, lineno, header[c], row[header[c]]) for c in range(len(header))]
             for lineno, row in rows]
    return MetricDef.travel_time(table, header)


def read_sightings(path, travel: MetricDef) -> list[Sighting]:
    """Columns ``who,time,location``; location is a name from the travel table or an index."""
    path, header, rows = _rows(path)
    _require(path, header, ["who", "time", "location"])
    out = []
    for lineno, row in rows:
        loc = row["location"]
        if travel.locations is not None and loc in travel.locations:
            idx = travel.locations.index(loc)
        else:
            try:
                idx = int(loc)
            except ValueError:
                raise SchemaError(f"{path} line {lineno} field location: unknown location {loc!r}") from None
            if not 0 <= idx < travel.n_locations:
                raise SchemaError(f"{path} line {lineno} field location: index {idx} out of range")
        if not row["who"]:
            raise SchemaError(f"{path} line {lineno} field who: empty")
        out.append(Sighting(row["who"], _num(path, lineno, "time", row["time"]), idx))
    return out
