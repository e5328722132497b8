"""Command line entry point: ``uavma {train,eval,sweep,baseline,export-plotdata}``.

Failures print one ``ErrorClass: message`` line on stderr and exit nonzero
(2 for bad input or configuration, 3 for an infeasible baseline mission,
1 for anything else).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..env import TRAJECTORY_COLUMNS, CollectionEnv, export_trace_jsonl, export_trajectory_csv
from ..errors import ConfigError, InfeasibleLinkError, ParameterError, UsageError
from ..sac import (evaluate, fixed_scenario_factory, load_checkpoint, save_checkpoint, train,
                   train_ac_baseline)
from ..world import Scenario
from .baseline import greedy_baseline
from .config import ExperimentConfig
from .export import export_plotdata
from .sweep import SweepSpec, run_sweep

SUMMARY_FIELDS = ("T_f", "T_BC", "T_MA", "total_time", "total_energy", "flight_distance", "success",
                  "steps", "hover_points")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(args, seed_key: str | None = "agent_seed", base: dict | None = None) -> ExperimentConfig:
    overrides = list(args.override or [])
    if args.seed is not None and seed_key:
        overrides.append(f"{seed_key}={args.seed}")
    if args.config is not None:
        return ExperimentConfig.load(args.config, overrides)
    return ExperimentConfig.from_dict(base, overrides)


def _out_dir(args, cfg) -> str:
    out = args.out or cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    return out


def _dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=True)
        fh.write("\n")


def _eval_block(metrics) -> dict:
    return {
        "episodes": len(metrics["episodes"]),
        "mean_total_time_s": metrics["mean_total_time"],
        "mean_energy_J": metrics["mean_energy"],
        "mean_flight_m": metrics["mean_flight_distance"],
        "mean_return": metrics["mean_return"],
        "success_rate": metrics["success_rate"],
    }


def cmd_train(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    scenario = cfg.scenario()
    cfg.to_yaml(os.path.join(out, "config.yaml"))
    scenario.to_json(os.path.join(out, "scenario.json"))
    factory = fixed_scenario_factory(scenario, cfg.env_config())
    meta = {"config": cfg.data, "scenario_seed": cfg["scenario"]["seed"], "agent_seed": cfg.agent_seed}
    ckpt_dir = os.path.join(out, "checkpoints")
    os.makedirs(ckpt_dir, exist_ok=True)
    log_path = os.path.join(out, "training_log.csv")
    if cfg["algorithm"] == "sac":
        agent, log = train(factory, cfg.sac_config(), cfg.agent_seed, log_path, ckpt_dir, meta)
    else:
        agent, log = train_ac_baseline(factory, cfg.ac_config(), cfg.agent_seed, log_path)
    save_checkpoint(agent, os.path.join(ckpt_dir, "final.json"), meta)
    metrics = evaluate(agent, factory, cfg["eval_episodes"])
    _dump_json({
        "algorithm": cfg["algorithm"],
        "mode": cfg.mode,
        "scenario_seed": cfg["scenario"]["seed"],
        "agent_seed": cfg.agent_seed,
        "episodes_trained": len(log),
        "evaluation": _eval_block(metrics),
        "final_episode": metrics["episodes"][-1].as_dict(),
    }, os.path.join(out, "summary.json"))
    print(out)
    return 0


def cmd_eval(args) -> int:
    agent, meta = load_checkpoint(args.checkpoint)
    base = meta.get("config") if isinstance(meta, dict) else None
    cfg = _load(args, base=base)
    scenario = Scenario.from_json(args.scenario) if args.scenario else cfg.scenario()
    env_cfg = cfg.env_config()
    env = CollectionEnv(scenario, env_cfg)
    if agent.action_dim != env.action_dim:
        raise UsageError(f"checkpoint action_dim {agent.action_dim} does not match {cfg.mode} env "
                         f"action_dim {env.action_dim}")
    if agent.state_dim != env.state_dim:
        raise UsageError(f"checkpoint state_dim {agent.state_dim} does not match env state_dim "
                         f"{env.state_dim} (K={scenario.K})")
    out = _out_dir(args, cfg)
    traj = os.path.join(out, "trajectory.csv")
    with open(traj, "w", newline="") as fh:
        fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")

    def record(i, e):
        export_trajectory_csv(e.records, traj, episode=i, append=True)

    episodes = args.episodes or cfg["eval_episodes"]
    metrics = evaluate(agent, lambda i: env, episodes, record)
    with open(os.path.join(out, "episodes.csv"), "w") as fh:
        fh.write(",".join(("episode", "return") + SUMMARY_FIELDS) + "\n")
        for i, (s, r) in enumerate(zip(metrics["episodes"], metrics["returns"])):
            d = s.as_dict()
            vals = [i, repr(float(r))] + [repr(d[k]) if isinstance(d[k], float) else int(d[k])
                                          for k in SUMMARY_FIELDS]
            fh.write(",".join(str(v) for v in vals) + "\n")
    _dump_json({"checkpoint": os.path.abspath(args.checkpoint), "mode": cfg.mode,
                "evaluation": _eval_block(metrics)}, os.path.join(out, "eval_summary.json"))
    print(out)
    return 0


def cmd_baseline(args) -> int:
    cfg = _load(args, "scenario.seed")
    out = _out_dir(args, cfg)
    scenario = cfg.scenario()
    result = greedy_baseline(scenario, cfg.env_config())
    cfg.to_yaml(os.path.join(out, "config.yaml"))
    scenario.to_json(os.path.join(out, "scenario.json"))
    export_trajectory_csv(result.records, os.path.join(out, "trajectory.csv"))
    export_trace_jsonl(result.records, os.path.join(out, "trace.jsonl"))
    _dump_json({"mode": result.mode, "scenario_seed": scenario.seed, "summary": result.summary.as_dict(),
                "infeasible_ids": result.infeasible_ids}, os.path.join(out, "summary.json"))
    if result.infeasible_ids:
        ids = ",".join(str(k) for k in result.infeasible_ids)
        raise InfeasibleLinkError(f"devices {ids} never qualify, even from directly overhead")
    print(out)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args, "scenario.seed")
    try:
        values = [float(v) if args.variable == "L" else int(v) for v in args.values.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --values list: {exc}") from None
    spec = SweepSpec(args.variable, tuple(values), args.trials, args.method)
    out = _out_dir(args, cfg)
    cfg.to_yaml(os.path.join(out, "config.yaml"))
    run_sweep(spec, cfg, os.path.join(out, "sweep.csv"))
    print(out)
    return 0


def cmd_export(args) -> int:
    for p in export_plotdata(args.run_dir, args.out, args.window):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML file overlaid on the reference configuration")
    common.add_argument("--override", action="append", metavar="KEY=VALUE",
                        help="dotted key override, e.g. sac.gamma=0.95 (repeatable)")
    common.add_argument("--seed", type=int,
                        help="agent seed (train, eval) or scenario seed (baseline, sweep)")
    common.add_argument("--out", help="output directory (default: out_dir from the config)")

    p = _Parser(prog="uavma", description="UAV backscatter data-collection simulator and trainer")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    t = sub.add_parser("train", parents=[common], help="train an agent and write run artifacts")
    t.set_defaults(func=cmd_train)
    e = sub.add_parser("eval", parents=[common], help="evaluate a checkpoint deterministically")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--scenario", help="scenario JSON (default: generated from the config)")
    e.add_argument("--episodes", type=int)
    e.set_defaults(func=cmd_eval)
    s = sub.add_parser("sweep", parents=[common], help="sweep K or L and aggregate metrics")
    s.add_argument("--variable", choices=("K", "L"), required=True)
    s.add_argument("--values", required=True, help="comma-separated, ascending")
    s.add_argument("--trials", type=int, default=5)
    s.add_argument("--method", choices=("baseline", "sac", "ac"), default="baseline")
    s.set_defaults(func=cmd_sweep)
    b = sub.add_parser("baseline", parents=[common], help="fly the greedy nearest-device planner")
    b.set_defaults(func=cmd_baseline)
    x = sub.add_parser("export-plotdata", parents=[common], help="write plot-ready CSVs for a run dir")
    x.add_argument("run_dir")
    x.add_argument("--window", type=int, default=100)
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes one parseable line
        if isinstance(exc, (ConfigError, UsageError, ParameterError)):
            code = 2
        elif isinstance(exc, InfeasibleLinkError):
            code = 3
        else:
            code = 1
        msg = " ".join(str(exc).split())
        print(f"{type(exc).__name__}: {msg}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
