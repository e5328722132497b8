"""
Greedy missions, MA versus FPA
==============================

The scripted planner flies to the nearest pending device, stops as soon as
it qualifies, and serves everything in range. Run with
``python3 demos/02_greedy_missions.py``.
"""

from uavma.harness import ExperimentConfig, SweepSpec, greedy_baseline, run_sweep
from uavma.harness.sweep import aggregate

cfg = ExperimentConfig.from_dict()
scenario = cfg.scenario(seed=7)
ma = greedy_baseline(scenario, cfg.env_config("MA"))
print("MA mission:", {k: round(v, 2) if isinstance(v, float) else v for k, v in ma.summary.as_dict().items()})

# with the reference budget the omni antenna cannot close the return link
fpa = greedy_baseline(scenario, cfg.env_config("FPA"))
print(f"FPA devices that never qualify: {len(fpa.infeasible_ids)} of {scenario.K}")

# a 10 dB more sensitive reader lets both antennas finish
relaxed = cfg.with_overrides("channel.reader_sens_dbm=-110.0")
for mode in ("MA", "FPA"):
    s = greedy_baseline(scenario, relaxed.env_config(mode)).summary
    print(f"{mode:3s} at -110 dBm: time {s.total_time:6.1f} s, flight {s.flight_distance:6.1f} m, "
          f"hover points {s.hover_points}")

# mission time grows with the number of devices
rows = run_sweep(SweepSpec("K", (5, 10, 15, 20), trials=3), cfg)
for k, row in aggregate(rows, "mean").items():
    print(f"K = {int(k):2d}: mean time {row['total_time_s']:6.1f} s, mean flight {row['flight_m']:6.1f} m")
