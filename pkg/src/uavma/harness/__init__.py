"""Configuration, scripted baselines, sweeps, plot-data export and the CLI."""

from .baseline import STOP_RESOLUTION_M, BaselineResult, greedy_baseline, stop_distance
from .config import ExperimentConfig, reference_dict
from .export import export_plotdata, moving_average, read_trajectory_csv
from .sweep import SweepSpec, read_sweep_csv, run_sweep

__all__ = [
    "STOP_RESOLUTION_M", "BaselineResult", "greedy_baseline", "stop_distance",
    "ExperimentConfig", "reference_dict",
    "export_plotdata", "moving_average", "read_trajectory_csv",
    "SweepSpec", "read_sweep_csv", "run_sweep",
]
