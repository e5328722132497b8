"""
Training SAC on a three-device toy
==================================

A short soft actor-critic run on a 50 m square with three devices, followed
by a deterministic evaluation and plot-ready CSVs. Takes a couple of minutes
on one core. Run with ``python3 demos/03_train_toy_agent.py [out_dir]``.
"""

import os
import sys

import numpy as np

from uavma import EnvConfig, generate_scenario
from uavma.harness import export_plotdata
from uavma.env import export_trajectory_csv
from uavma.sac import SacConfig, evaluate, fixed_scenario_factory, train

out = sys.argv[1] if len(sys.argv) > 1 else "runs/toy"
os.makedirs(out, exist_ok=True)

scenario = generate_scenario(seed=0, K=3, L=50.0)
factory = fixed_scenario_factory(scenario, EnvConfig())
config = SacConfig(hidden=(64, 64), batch_size=128, warmup_steps=2000, total_steps=30_000)

agent, log = train(factory, config, seed=0, log_path=os.path.join(out, "training_log.csv"))
returns = np.array([r["return"] for r in log])
print(f"{len(log)} episodes; first 10 mean return {returns[:10].mean():.1f}, "
      f"last 10 {returns[-10:].mean():.1f}")

# returns saturate near K * r_bs + r_f, so watch mission time instead
times = np.array([r["total_time_s"] for r in log])
print(f"mission time first 10 {times[:10].mean():.1f} s, last 10 {times[-10:].mean():.1f} s")

metrics = evaluate(agent, factory, 20,
                   record=lambda i, env: export_trajectory_csv(env.records, os.path.join(out, "trajectory.csv"))
                   if i == 0 else None)
print(f"deterministic policy: success {metrics['success_rate']:.2f}, "
      f"time {metrics['mean_total_time']:.1f} s, flight {metrics['mean_flight_distance']:.1f} m")

for path in export_plotdata(out):
    print("wrote", path)
