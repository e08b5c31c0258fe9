"""File formats: F2D binary grids, CSV grids, JSON manifests and reports.

F2D layout (all little-endian)::

    offset  size  field
    0       4     magic b"F2D1"
    4       4     u32 rows
    8       4     u32 cols
    12      1     u8 dtype (0 = float32, 1 = float64)
    13      3     reserved, zero
    16      ...   rows * cols values, row-major
"""

from __future__ import annotations

import csv
import json
import math
import os
import struct
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import GridField2D, SimilarityReport, check_grid

__all__ = [
    "F2DError",
    "ManifestEntry",
    "write_f2d",
    "read_f2d",
    "read_csv_grid",
    "read_grid",
    "read_pairs_csv",
    "read_manifest",
    "write_manifest",
    "format_5sig",
    "report_to_dict",
    "dumps_json",
    "write_report_json",
]

MAGIC = b"F2D1"
_HEADER = struct.Struct("<4sIIB3s")
_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}


class F2DError(ValueError):
    pass


def write_f2d(grid, path) -> None:
    grid = check_grid(grid)
    code = _CODES[grid.dtype]
    header = _HEADER.pack(MAGIC, grid.rows, grid.cols, code, b"\0\0\0")
    payload = np.ascontiguousarray(grid.values, dtype=_DTYPES[code]).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_f2d(path) -> GridField2D:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise F2DError(f"{path}: bad magic")
    if len(blob) < _HEADER.size:
        raise F2DError(f"{path}: truncated header")
    _, rows, cols, code, reserved = _HEADER.unpack_from(blob)
    if code not in _DTYPES:
        raise F2DError(f"{path}: unknown dtype code {code}")
    if reserved != b"\0\0\0":
        raise F2DError(f"{path}: reserved header bytes are not zero")
    if rows < 1 or cols < 1:
        raise F2DError(f"{path}: invalid dimensions {rows}x{cols}")
    dt = _DTYPES[code]
    expected = rows * cols * dt.itemsize
    payload = blob[_HEADER.size :]
    if len(payload) < expected:
        raise F2DError(f"{path}: truncated payload ({len(payload)} of {expected} bytes)")
    if len(payload) > expected:
        raise F2DError(f"{path}: {len(payload) - expected} trailing bytes after payload")
    values = np.frombuffer(payload, dtype=dt).reshape(rows, cols)
    return GridField2D(values.astype(dt.newbyteorder("="), copy=True))


def read_csv_grid(path) -> GridField2D:
    rows = []
    with open(path, newline="") as fh:
        for r, record in enumerate(csv.reader(fh)):
            if not record or all(not tok.strip() for tok in record):
                continue
            parsed = []
            for c, tok in enumerate(record):
                tok = tok.strip()
                if tok.lower() == "nan":
                    parsed.append(math.nan)
                    continue
                try:
                    val = float(tok)
                except ValueError:
                    raise ValueError(f"{path}: unparseable token {tok!r} at row {r}, col {c}") from None
                if not math.isfinite(val):
                    raise ValueError(f"{path}: non-finite value {tok!r} at row {r}, col {c}")
                parsed.append(val)
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: empty grid")
    width = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: ragged rows (row {r} has {len(row)} values, expected {width})")
    return GridField2D(np.array(rows, dtype=np.float64))


def read_grid(path) -> GridField2D:
    """Read F2D or CSV, sniffing the magic bytes before trusting the extension."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_f2d(path)
    if str(path).lower().endswith(".f2d"):
        raise F2DError(f"{path}: bad magic")
    return read_csv_grid(path)


def read_pairs_csv(path) -> np.ndarray:
    """``(n, 2)`` array of (ref, dssim) rows; a non-numeric first row is a header."""
    out = []
    with open(path, newline="") as fh:
        for r, record in enumerate(csv.reader(fh)):
            if not record or all(not tok.strip() for tok in record):
                continue
            if len(record) < 2:
                raise ValueError(f"{path}: row {r} needs ref and dssim columns")
            try:
                ref, dssim = float(record[0]), float(record[1])
            except ValueError:
                if r == 0 and not out:
                    continue
                raise ValueError(f"{path}: unparseable row {r}: {record!r}") from None
            if not (math.isfinite(ref) and math.isfinite(dssim)):
                raise ValueError(f"{path}: non-finite score in row {r}")
            out.append((ref, dssim))
    if not out:
        raise ValueError(f"{path}: no score rows")
    return np.array(out, dtype=np.float64)


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path_original: str
    path_comparison: str
    tags: dict = field(default_factory=dict)


def read_manifest(path) -> list:
    """Entries of a JSON manifest; relative paths resolve against its directory."""
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise ValueError(f"{path}: manifest must be an object with an 'entries' array")
    base = Path(path).resolve().parent
    seen = set()
    entries = []
    for i, raw in enumerate(doc["entries"]):
        try:
            eid = str(raw["id"])
            a = str(raw["path_original"])
            b = str(raw["path_comparison"])
        except (KeyError, TypeError):
            raise ValueError(f"{path}: entry {i} needs id, path_original and path_comparison") from None
        if not a or not b:
            raise ValueError(f"{path}: entry {eid!r} has an empty path")
        if eid in seen:
            raise ValueError(f"{path}: duplicate id {eid!r}")
        seen.add(eid)
        tags = raw.get("tags") or {}
        if not isinstance(tags, dict):
            raise ValueError(f"{path}: entry {eid!r} tags must be an object")
        entries.append(ManifestEntry(
            id=eid,
            path_original=str(base / a),
            path_comparison=str(base / b),
            tags={str(k): str(v) for k, v in tags.items()},
        ))
    return entries


def write_manifest(entries, path) -> None:
    doc = {"entries": [
        {"id": e.id, "path_original": e.path_original, "path_comparison": e.path_comparison, "tags": dict(e.tags)}
        for e in entries
    ]}
    Path(path).write_text(dumps_json(doc))


def format_5sig(value: float) -> str:
    if value is None or math.isnan(value):
        return "nan"
    return f"{value:#.5g}"


def _finite_or_none(v):
    return None if v is None or math.isnan(v) else float(v)


def report_to_dict(report: SimilarityReport, **extra) -> dict:
    out = {
        "variant": report.options.variant.value,
        "mean_value": _finite_or_none(report.mean_value),
        "mean_5sig": format_5sig(report.mean_value),
        "windows": {
            "total": report.windows_total,
            "border_excluded": report.windows_border_excluded,
            "missing_excluded": report.windows_missing_excluded,
        },
        "data_min": report.data_min,
        "data_max": report.data_max,
        "degenerate": bool(report.degenerate),
        "options": report.options.to_dict(),
    }
    if report.nominal_cr is not None:
        out["nominal_cr"] = float(report.nominal_cr)
    out.update(extra)
    return out


def dumps_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report_json(reports, path) -> None:
    """Write one report, or a list of them, as deterministic JSON.

    ``path`` may be ``"-"`` for stdout. Dicts pass through unchanged, so
    callers can attach ids or paths via :func:`report_to_dict` first.
    """
    if isinstance(reports, (list, tuple)):
        doc = {"reports": [r if isinstance(r, dict) else report_to_dict(r) for r in reports]}
    else:
        doc = reports if isinstance(reports, dict) else report_to_dict(reports)
    text = dumps_json(doc)
    if str(path) == "-":
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
