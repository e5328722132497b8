"""Plot-ready CSVs from a run directory (no rendering here)."""

from __future__ import annotations

import csv
import os

import numpy as np

from ..errors import UsageError
from ..sac import read_log
from .sweep import aggregate, read_sweep_csv

RUN_FILES = ("training_log.csv", "sweep.csv", "trajectory.csv")


def moving_average(values, window: int) -> np.ndarray:
    """Trailing mean; the first ``window - 1`` points average what exists so far."""
    if window < 1:
        raise UsageError("window must be >= 1")
    x = np.asarray(values, dtype=float)
    c = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(1, x.size + 1)
    lo = np.maximum(idx - window, 0)
    return (c[idx] - c[lo]) / (idx - lo)


def _write(path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])


def training_curve(log_rows, window: int = 100):
    ret = moving_average([r["return"] for r in log_rows], window)
    return [(r["env_step"], r["episode"], float(r["return"]), float(s)) for r, s in zip(log_rows, ret)]


def sweep_curve(rows):
    means, stds = aggregate(rows, "mean"), aggregate(rows, "std")
    out = []
    for v, m in means.items():
        s = stds.get(v, {})
        out.append((v, m["total_time_s"], s.get("total_time_s", float("nan")), m["energy_J"],
                    s.get("energy_J", float("nan")), m["flight_m"], s.get("flight_m", float("nan")),
                    m["success"]))
    return out


def read_trajectory_csv(path) -> list:
    ints = ("episode", "step", "n_s")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for k, v in r.items():
            if k in ints:
                r[k] = int(v)
            elif k not in ("served_ids", "ma_targets"):
                r[k] = float(v)
    return rows


def trajectory_overlay(rows):
    """Tidy vertex list per episode: the start point then each hover point."""
    out = []
    for ep in sorted({r["episode"] for r in rows}):
        legs = [r for r in rows if r["episode"] == ep]
        if not legs:
            continue
        out.append((ep, 0, legs[0]["from_x"], legs[0]["from_y"], 0, ""))
        for r in legs:
            out.append((ep, r["step"], r["x"], r["y"], r["n_s"], r["served_ids"]))
    return out


def export_plotdata(run_dir, out_dir=None, window: int = 100) -> list:
    """Convert whichever run artifacts exist; returns the files written."""
    found = {f: os.path.join(run_dir, f) for f in RUN_FILES if os.path.isfile(os.path.join(run_dir, f))}
    if not found:
        raise UsageError(f"no plottable artifacts in {run_dir}; expected any of: {', '.join(RUN_FILES)}")
    out_dir = out_dir or os.path.join(run_dir, "plotdata")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "training_log.csv" in found:
        p = os.path.join(out_dir, "training_curve.csv")
        _write(p, ("env_step", "episode", "return", "smoothed_return"),
               training_curve(read_log(found["training_log.csv"]), window))
        written.append(p)
    if "sweep.csv" in found:
        p = os.path.join(out_dir, "sweep_curve.csv")
        _write(p, ("value", "mean_total_time_s", "std_total_time_s", "mean_energy_J", "std_energy_J",
                   "mean_flight_m", "std_flight_m", "success_rate"),
               sweep_curve(read_sweep_csv(found["sweep.csv"])))
        written.append(p)
    if "trajectory.csv" in found:
        p = os.path.join(out_dir, "trajectory_overlay.csv")
        _write(p, ("episode", "vertex", "x", "y", "n_s", "served_ids"),
               trajectory_overlay(read_trajectory_csv(found["trajectory.csv"])))
        written.append(p)
    return written
