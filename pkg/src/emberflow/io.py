"""Plain-text field dumps, front and series tables, and grayscale frames.

Field CSV layout: a header line ``# nx ny dx dy origin_x origin_y t`` carrying
those seven values, then one line per grid row ``j`` (bottom to top) holding
``u[0, j], ..., u[nx-1, j]``.  Floats are written in shortest round-trip form, so
a dump reads back bit for bit.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import EmberflowError
from .grid import Grid

SERIES_COLUMNS = ("t", "burned_area", "running_max_area", "max_u")


def _g(x) -> str:
    return repr(float(x))


def write_field_csv(path, u, grid: Grid, t: float = 0.0) -> Path:
    path = Path(path)
    u = np.asarray(u, dtype=float)
    header = " ".join([str(grid.nx), str(grid.ny), _g(grid.dx), _g(grid.dy),
                       _g(grid.origin[0]), _g(grid.origin[1]), _g(t)])
    lines = ["# " + header]
    lines += [",".join(_g(v) for v in u[:, j]) for j in range(grid.ny)]
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise EmberflowError(f"cannot write field file {path}: {exc}") from exc
    return path


def read_field_csv(path) -> tuple[np.ndarray, Grid, float]:
    path = Path(path)
    try:
        text = path.read_text().splitlines()
    except OSError as exc:
        raise EmberflowError(f"cannot read field file {path}: {exc}") from exc
    if not text or not text[0].startswith("#"):
        raise EmberflowError(f"{path}: missing '# nx ny dx dy origin_x origin_y t' header")
    parts = text[0][1:].split()
    if len(parts) != 7:
        raise EmberflowError(f"{path}: header needs 7 values, got {len(parts)}")
    nx, ny = int(parts[0]), int(parts[1])
    dx, dy, ox, oy, t = (float(p) for p in parts[2:])
    rows = [line for line in text[1:] if line.strip()]
    if len(rows) != ny:
        raise EmberflowError(f"{path}: expected {ny} rows, found {len(rows)}")
    u = np.array([[float(v) for v in row.split(",")] for row in rows]).T
    if u.shape != (nx, ny):
        raise EmberflowError(f"{path}: expected {nx} values per row")
    return u, Grid(nx, ny, dx, dy, (ox, oy)), t


def write_front_csv(path, samples) -> Path:
    """One line per front vertex: ``chain_id,x,y,H,grad_mag,v_pred[,v_obs]``."""
    path = Path(path)
    cols = ["chain_id", "x", "y", "H", "grad_mag", "v_pred"]
    has_obs = samples.v_observed is not None
    if has_obs:
        cols.append("v_obs")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for k in range(len(samples)):
            row = [int(samples.chain_id[k]), _g(samples.position[k, 0]), _g(samples.position[k, 1]),
                   _g(samples.curvature[k]), _g(samples.grad_mag[k]), _g(samples.v_predicted[k])]
            if has_obs:
                row.append(_g(samples.v_observed[k]))
            w.writerow(row)
    return path


def write_series_csv(path, snapshots) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SERIES_COLUMNS)
        for s in snapshots:
            w.writerow([_g(s.t), _g(s.burned_area), _g(s.running_max_area), _g(s.max_u)])
    return path


def read_series_csv(path) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise EmberflowError(f"cannot read series file {path}: {exc}") from exc
    if rows and set(SERIES_COLUMNS) - set(rows[0]):
        raise EmberflowError(f"{path}: not a series file (columns {list(rows[0])})")
    return {c: np.array([float(r[c]) for r in rows]) for c in SERIES_COLUMNS}


def frame_bytes(u) -> np.ndarray:
    """8-bit raster of ``u`` mapped linearly from ``[0, max u]``; top row is the largest y."""
    u = np.asarray(u, dtype=float)
    top = float(np.max(u))
    scaled = np.zeros_like(u) if top <= 0 else np.clip(u, 0.0, top) / top
    img = np.floor(scaled * 255.0 + 0.5).astype(np.uint8)
    return np.ascontiguousarray(img.T[::-1])


def write_pgm(path, u) -> Path:
    path = Path(path)
    img = frame_bytes(u)
    path.write_bytes(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode() + img.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise EmberflowError(f"{path}: not an 8-bit binary PGM")
    w, h = (int(x) for x in dims.split())
    return np.frombuffer(rest, dtype=np.uint8).reshape(h, w)


def export_series(snapshots, grid: Grid, out_dir) -> Path:
    """Write every snapshot's field, front and frame plus ``series.csv`` into ``out_dir``.

    Existing files of the same names are overwritten, so re-exporting is idempotent.
    """
    if not snapshots:
        raise EmberflowError("nothing to export: empty snapshot list")
    out = Path(out_dir)
    try:
        (out / "frames").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise EmberflowError(f"cannot create output directory {out}: {exc}") from exc
    for k, s in enumerate(snapshots):
        write_field_csv(out / f"u_{k}.csv", s.u, grid, s.t)
        write_front_csv(out / f"front_{k}.csv", s.samples)
        write_pgm(out / "frames" / f"frame_{k}.pgm", s.u)
    return write_series_csv(out / "series.csv", snapshots)
