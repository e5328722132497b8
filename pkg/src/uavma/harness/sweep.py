"""Parameter sweeps over the device count ``K`` or the area side ``L``.

Trial ``t`` of every sweep point uses scenario seed ``base_seed + t``, and
for learned methods agent seed ``agent_seed + t``. Because scenarios are
generated per device, a smaller ``K`` with the same seed is a prefix of a
larger one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..sac import evaluate, fixed_scenario_factory, train, train_ac_baseline
from .baseline import greedy_baseline
from .config import ExperimentConfig

SWEEP_COLUMNS = ("value", "trial", "total_time_s", "energy_J", "flight_m", "success", "status")
METHODS = ("baseline", "sac", "ac")
_METRICS = ("total_time_s", "energy_J", "flight_m", "success")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    trials: int = 5
    method: str = "baseline"

    def __post_init__(self):
        if self.variable not in ("K", "L"):
            raise ParameterError(f"sweep variable must be K or L, got {self.variable!r}")
        if self.method not in METHODS:
            raise ParameterError(f"sweep method must be one of {METHODS}")
        vals = tuple(self.values)
        if not vals or any(v <= 0 for v in vals):
            raise ParameterError("sweep values must be positive")
        if list(vals) != sorted(vals):
            raise ParameterError("sweep values must be sorted")
        if self.variable == "K" and any(int(v) != v for v in vals):
            raise ParameterError("K values must be integers")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        object.__setattr__(self, "values", vals)


def run_trial(cfg: ExperimentConfig, spec: SweepSpec, value, trial: int) -> dict:
    seed = cfg["scenario"]["seed"] + trial
    if spec.variable == "K":
        scenario = cfg.scenario(seed=seed, K=int(value))
    else:
        # revalidate: the per-device reward bound depends on L
        cfg = cfg.with_overrides(f"scenario.L_m={float(value)}")
        scenario = cfg.scenario(seed=seed)
    env_cfg = cfg.env_config()

    if spec.method == "baseline":
        summ = greedy_baseline(scenario, env_cfg).summary
    else:
        factory = fixed_scenario_factory(scenario, env_cfg)
        if spec.method == "sac":
            agent, _ = train(factory, cfg.sac_config(), cfg.agent_seed + trial)
        else:
            agent, _ = train_ac_baseline(factory, cfg.ac_config(), cfg.agent_seed + trial)
        summ = evaluate(agent, factory, 1)["episodes"][0]
    return {
        "total_time_s": summ.total_time,
        "energy_J": summ.total_energy,
        "flight_m": summ.flight_distance,
        "success": int(summ.success),
    }


def run_sweep(spec: SweepSpec, cfg: ExperimentConfig, path=None) -> list:
    """Run every (value, trial) pair and append mean/std rows per value.

    A failing trial is recorded with its error class in ``status`` and NaN
    metrics; aggregates use the trials that ran. Standard-deviation rows
    (sample, ``ddof=1``) are only emitted when ``trials > 1``.
    """
    rows = []
    for value in spec.values:
        block = []
        for t in range(spec.trials):
            try:
                metrics = run_trial(cfg, spec, value, t)
                status = "ok"
            except Exception as exc:  # noqa: BLE001 - recorded per trial, sweep continues
                metrics = {k: math.nan for k in _METRICS}
                status = type(exc).__name__
            row = {"value": value, "trial": t, **metrics, "status": status}
            rows.append(row)
            block.append(row)
        done = [r for r in block if r["status"] == "ok"]
        agg = {k: np.array([r[k] for r in done], dtype=float) for k in _METRICS}
        rows.append({"value": value, "trial": "mean",
                     **{k: float(v.mean()) if v.size else math.nan for k, v in agg.items()},
                     "status": f"{len(done)}/{len(block)}"})
        if spec.trials > 1:
            rows.append({"value": value, "trial": "std",
                         **{k: float(v.std(ddof=1)) if v.size > 1 else math.nan for k, v in agg.items()},
                         "status": f"{len(done)}/{len(block)}"})
    if path is not None:
        write_sweep_csv(rows, path)
    return rows


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def read_sweep_csv(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            row = {k: float(r[k]) for k in _METRICS}
            row["value"] = float(r["value"])
            row["trial"] = r["trial"] if r["trial"] in ("mean", "std") else int(r["trial"])
            row["status"] = r["status"]
            out.append(row)
    return out


def aggregate(rows, kind="mean") -> dict:
    """``{value: row}`` for the aggregate rows of one kind."""
    return {r["value"]: r for r in rows if r["trial"] == kind}
