"""CSV ingestion: paired samples and tabulated functions on the unit square."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import Copula2D, snap_unit
from .errors import CsvFormatError
from .stats import Sample

_GRID_HEADER = ("u", "v", "value")


def _parse_float(cell: str, line: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise CsvFormatError(f"column {column!r} has non-numeric value {cell!r}", line) from None


def load_sample_csv(path) -> Sample:
    """Read a two-column numeric CSV into a Sample.

    A header row is detected by a non-numeric first row and skipped. Rows with
    missing or extra fields are rejected with their 1-based line number.
    """
    xs: list[float] = []
    ys: list[float] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for line, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row]
            if len(cells) < 2:
                raise CsvFormatError("expected two columns (x, y); second column is missing", line)
            if len(cells) > 2:
                raise CsvFormatError(f"expected two columns (x, y), found {len(cells)}", line)
            if line == 1 and not _looks_numeric(cells):
                continue  # header
            xs.append(_parse_float(cells[0], line, "x"))
            ys.append(_parse_float(cells[1], line, "y"))
    if not xs:
        raise CsvFormatError(f"{path}: no data rows found")
    return Sample(np.asarray(xs), np.asarray(ys))


def _looks_numeric(cells) -> bool:
    try:
        for cell in cells:
            float(cell)
    except ValueError:
        return False
    return True


def load_grid_csv(path) -> Copula2D:
    """Reconstruct a candidate copula from a tabulated complete uniform grid.

    The file must have the header ``u,v,value`` and one row per node of a
    uniform grid covering [0,1] on both axes (endpoints included). Evaluation
    between nodes uses bilinear interpolation, which reproduces the table
    exactly at the nodes.
    """
    rows: list[tuple[float, float, float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CsvFormatError(f"{path}: file is empty")
        if tuple(cell.strip().lower() for cell in header) != _GRID_HEADER:
            raise CsvFormatError("expected header 'u,v,value'", 1)
        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row]
            if len(cells) != 3:
                raise CsvFormatError(f"expected three columns (u, v, value), found {len(cells)}", line)
            u = snap_unit(_parse_float(cells[0], line, "u"), "u")
            v = snap_unit(_parse_float(cells[1], line, "v"), "v")
            rows.append((u, v, _parse_float(cells[2], line, "value")))
    if not rows:
        raise CsvFormatError(f"{path}: no data rows found")

    us = np.unique([r[0] for r in rows])
    vs = np.unique([r[1] for r in rows])
    if us.size < 2 or vs.size < 2:
        raise CsvFormatError(f"{path}: grid needs at least 2 distinct values per axis")
    for axis, nodes in (("u", us), ("v", vs)):
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise CsvFormatError(f"{path}: {axis} grid must span [0, 1] with endpoints included")
        spacing = np.diff(nodes)
        if np.max(np.abs(spacing - spacing[0])) > 1e-9:
            raise CsvFormatError(f"{path}: {axis} grid is not uniformly spaced")
    if len(rows) != us.size * vs.size:
        raise CsvFormatError(
            f"{path}: grid is incomplete: expected {us.size * vs.size} rows "
            f"({us.size} x {vs.size} nodes), found {len(rows)}"
        )

    table = np.full((us.size, vs.size), np.nan)
    u_index = {u: i for i, u in enumerate(us.tolist())}
    v_index = {v: j for j, v in enumerate(vs.tolist())}
    for u, v, value in rows:
        i, j = u_index[u], v_index[v]
        if not np.isnan(table[i, j]):
            raise CsvFormatError(f"{path}: duplicate node ({u}, {v})")
        table[i, j] = value

    return Copula2D(name=Path(path).stem, func=_bilinear(us, vs, table))


def _bilinear(us: np.ndarray, vs: np.ndarray, table: np.ndarray):
    def interpolate(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        i = np.clip(np.searchsorted(us, u, side="right") - 1, 0, us.size - 2)
        j = np.clip(np.searchsorted(vs, v, side="right") - 1, 0, vs.size - 2)
        t = (u - us[i]) / (us[i + 1] - us[i])
        s = (v - vs[j]) / (vs[j + 1] - vs[j])
        return (
            (1.0 - t) * (1.0 - s) * table[i, j]
            + t * (1.0 - s) * table[i + 1, j]
            + (1.0 - t) * s * table[i, j + 1]
            + t * s * table[i + 1, j + 1]
        )

    return interpolate


def write_grid_csv(path, us, vs, values) -> None:
    """Write a tabulated grid in the format load_grid_csv reads (row-major by u)."""
    values = np.asarray(values, dtype=float)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_GRID_HEADER)
        for i, u in enumerate(np.asarray(us, dtype=float)):
            for j, v in enumerate(np.asarray(vs, dtype=float)):
                writer.writerow([repr(float(u)), repr(float(v)), repr(float(values[i, j]))])
