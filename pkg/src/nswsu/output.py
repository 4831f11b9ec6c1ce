"""CSV writers and readers. Floats are written with ``repr`` so they round-trip exactly."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import DEFAULT_FLOOR, Formulation, Grid1D, StateU, Trajectory

ENERGY_HEADER = ["t", "kinetic", "potential", "dissipation_accum", "total"]
STABILITY_HEADER = ["t", "H", "D", "lambda", "bound", "margin"]


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_timeseries(traj: Trajectory, grid: Grid1D, out_dir, energies=None, stability=None,
                     floor: float = DEFAULT_FLOOR) -> list[Path]:
    """Write ``energy.csv``, ``stability.csv`` (when given) and one ``snapshot_<k>.csv`` per snapshot."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror or exc}") from exc
    written = []
    if energies is not None:
        rows = ([e.time, e.kinetic, e.potential, e.dissipation_accum, e.total] for e in energies)
        written.append(write_csv(out / "energy.csv", ENERGY_HEADER, rows))
    if stability is not None:
        written.append(write_stability(stability, out / "stability.csv"))

    vel_name = "u" if traj.formulation is Formulation.U_FORM else "v"
    x = grid.x
    for k, snap in enumerate(traj.snapshots):
        vel = snap.velocity(floor) if isinstance(snap, StateU) else snap.v
        written.append(write_csv(out / f"snapshot_{k}.csv", ["x", "rho", vel_name], zip(x, snap.rho, vel)))
    return written


def write_stability(report, path) -> Path:
    r = report
    return write_csv(path, STABILITY_HEADER, zip(r.times, r.H, r.D, r.lam, r.bound, r.margin))


def read_snapshot(path):
    """Return ``(x, rho, velocity, velocity_name)`` from a snapshot CSV."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = np.array([[float(v) for v in row] for row in body]).reshape(len(body), 3)
    return cols[:, 0], cols[:, 1], cols[:, 2], header[2]
