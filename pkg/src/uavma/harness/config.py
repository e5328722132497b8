"""Experiment configuration: a sectioned YAML file with unit-suffixed keys.

User files and ``key=value`` overrides are overlaid on the shipped reference
configuration (``uavma/data/reference.yaml``). Validation collects every
violation before raising, so one failed load names all bad keys.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from importlib import resources

import yaml

from ..energy import MaParams, PropulsionParams
from ..env import EnvConfig
from ..errors import ConfigError
from ..link import BackscatterCoeff, ChannelParams
from ..sac import AcConfig, SacConfig
from ..world import Scenario, generate_scenario

SECTIONS = ("scenario", "channel", "backscatter", "propulsion", "ma", "energy", "env", "sac", "ac")


def reference_dict() -> dict:
    text = resources.files("uavma").joinpath("data/reference.yaml").read_text()
    return yaml.safe_load(text)


def _merge(base: dict, extra: dict, problems: dict, prefix="") -> None:
    for k, v in extra.items():
        key = f"{prefix}{k}"
        if k not in base:
            problems[key] = "unknown key"
        elif isinstance(base[k], dict):
            if not isinstance(v, dict):
                problems[key] = "expected a section mapping"
            else:
                _merge(base[k], v, problems, key + ".")
        else:
            base[k] = v


def _resolve(data: dict, key: str):
    """Dotted override key -> list of (section or None, leaf) targets."""
    if "." in key:
        sec, leaf = key.split(".", 1)
        return [(sec, leaf)]
    if key in data and not isinstance(data[key], dict):
        return [(None, key)]
    return [(sec, key) for sec in SECTIONS if key in data[sec]]


def parse_override(text: str):
    if "=" not in text:
        raise ConfigError({text: "override must look like key=value"})
    key, raw = text.split("=", 1)
    return key.strip(), yaml.safe_load(raw)


def apply_overrides(data: dict, overrides, problems: dict) -> None:
    for item in overrides:
        key, value = parse_override(item) if isinstance(item, str) else item
        targets = _resolve(data, key)
        if not targets:
            problems[key] = "unknown key"
        for sec, leaf in targets:
            node = data if sec is None else data.get(sec)
            if not isinstance(node, dict) or leaf not in node:
                problems[key] = "unknown key"
            else:
                node[leaf] = value


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_types(ref: dict, data: dict, problems: dict, prefix="") -> None:
    for k, rv in ref.items():
        v = data[k]
        key = f"{prefix}{k}"
        if isinstance(rv, dict):
            _check_types(rv, v, problems, key + ".")
        elif isinstance(rv, bool):
            if not isinstance(v, bool):
                problems[key] = "expected a boolean"
        elif isinstance(rv, int):
            if not (isinstance(v, int) and not isinstance(v, bool)):
                problems[key] = "expected an integer"
        elif isinstance(rv, float):
            if not _is_num(v):
                problems[key] = "expected a finite number"
        elif isinstance(rv, str):
            if not isinstance(v, str):
                problems[key] = "expected a string"
        elif isinstance(rv, list):
            if not (isinstance(v, list) and v and all(isinstance(h, int) and h > 0 for h in v)):
                problems[key] = "expected a non-empty list of positive integers"
        elif rv is None:
            if v is not None and not _is_num(v):
                problems[key] = "expected a number or null"


def _check_ranges(d: dict, problems: dict) -> None:
    def need(cond, key, msg):
        if key not in problems and not cond:
            problems[key] = msg

    def ok(*keys):
        return all(k not in problems for k in keys)

    need(d["mode"] in ("MA", "FPA"), "mode", "must be MA or FPA")
    need(d["algorithm"] in ("sac", "ac"), "algorithm", "must be sac or ac")
    if ok("agent_seed"):
        need(d["agent_seed"] >= 0, "agent_seed", "must be >= 0")
    if ok("eval_episodes"):
        need(d["eval_episodes"] >= 1, "eval_episodes", "must be >= 1")

    s = d["scenario"]
    if ok("scenario.K"):
        need(s["K"] >= 1, "scenario.K", "must be >= 1")
    if ok("scenario.seed"):
        need(s["seed"] >= 0, "scenario.seed", "must be >= 0")
    for k in ("L_m", "H_m", "volume_min_bits"):
        if ok(f"scenario.{k}"):
            need(s[k] > 0, f"scenario.{k}", "must be positive")
    if ok("scenario.volume_min_bits", "scenario.volume_max_bits"):
        need(s["volume_max_bits"] > s["volume_min_bits"], "scenario.volume_max_bits",
             "must exceed volume_min_bits")
    if ok("scenario.L_m", "scenario.start_x_m", "scenario.start_y_m"):
        for k in ("start_x_m", "start_y_m"):
            need(0 <= s[k] <= s["L_m"], f"scenario.{k}", "start must lie inside [0, L_m]")

    c = d["channel"]
    for k in ("carrier_freq_hz", "bandwidth_hz", "carrier_power_w", "env_rho", "env_beta"):
        if ok(f"channel.{k}"):
            need(c[k] > 0, f"channel.{k}", "must be positive")
    if ok("channel.eta_los_db", "channel.eta_nlos_db"):
        need(c["eta_nlos_db"] >= c["eta_los_db"], "channel.eta_nlos_db", "must be >= eta_los_db")

    b = d["backscatter"]
    for k in ("chi", "modulation_factor"):
        if ok(f"backscatter.{k}"):
            need(0 < b[k] <= 1, f"backscatter.{k}", "must lie in (0, 1]")
    if ok("backscatter.chi", "backscatter.modulation_factor", "backscatter.on_object_penalty_db"):
        xi = b["chi"] ** 2 * b["modulation_factor"] / 10 ** (b["on_object_penalty_db"] / 5)
        need(0 < xi <= 1, "backscatter.on_object_penalty_db", f"backscatter efficiency {xi:.4g} outside (0, 1]")

    for sec in ("propulsion", "ma"):
        for k, v in d[sec].items():
            if ok(f"{sec}.{k}"):
                need(v > 0, f"{sec}.{k}", "must be positive")
    if ok("energy.capacity_j"):
        need(d["energy"]["capacity_j"] > 0, "energy.capacity_j", "must be positive")
    if ok("energy.comm_power_w"):
        need(d["energy"]["comm_power_w"] >= 0, "energy.comm_power_w", "must be >= 0")

    e = d["env"]
    if ok("env.step_cap"):
        need(e["step_cap"] >= 1, "env.step_cap", "must be >= 1")
    if ok("env.reward_finish"):
        need(e["reward_finish"] >= 0, "env.reward_finish", "must be >= 0")
    if ok("env.reward_per_bd", "scenario.L_m", "propulsion.uav_speed_mps"):
        bound = math.sqrt(2.0) * s["L_m"] / d["propulsion"]["uav_speed_mps"]
        need(e["reward_per_bd"] >= bound, "env.reward_per_bd",
             f"must be >= sqrt(2) * L_m / uav_speed_mps = {bound:.2f}")

    for sec in ("sac", "ac"):
        a = d[sec]
        if ok(f"{sec}.gamma"):
            need(0 < a["gamma"] < 1, f"{sec}.gamma", "must lie in (0, 1)")
        for k in ("lr_actor", "lr_critic", "reward_scale"):
            if ok(f"{sec}.{k}"):
                need(a[k] > 0, f"{sec}.{k}", "must be positive")
        if ok(f"{sec}.total_steps"):
            need(a["total_steps"] >= 0, f"{sec}.total_steps", "must be >= 0")
    a = d["sac"]
    if ok("sac.tau"):
        need(0 < a["tau"] <= 1, "sac.tau", "must lie in (0, 1]")
    for k in ("alpha_init", "lr_alpha"):
        if ok(f"sac.{k}"):
            need(a[k] > 0, f"sac.{k}", "must be positive")
    for k in ("updates_per_step", "eval_interval"):
        if ok(f"sac.{k}"):
            need(a[k] >= 1, f"sac.{k}", "must be >= 1")
    if ok("sac.warmup_steps"):
        need(a["warmup_steps"] >= 0, "sac.warmup_steps", "must be >= 0")
    if ok("sac.batch_size", "sac.buffer_capacity"):
        need(1 <= a["batch_size"] <= a["buffer_capacity"], "sac.batch_size", "must lie in [1, buffer_capacity]")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, fully populated configuration (``data`` mirrors the YAML)."""

    data: dict

    @classmethod
    def from_dict(cls, user: dict | None = None, overrides=()) -> "ExperimentConfig":
        ref = reference_dict()
        data = copy.deepcopy(ref)
        problems = {}
        if user:
            _merge(data, user, problems)
        apply_overrides(data, overrides, problems)
        if not problems:
            _check_types(ref, data, problems)
            _check_ranges(data, problems)
        if problems:
            raise ConfigError(problems)
        for sec in ("sac", "ac"):
            for k in ("total_steps", "batch_size", "buffer_capacity", "warmup_steps"):
                if k in data[sec]:
                    data[sec][k] = int(data[sec][k])
        return cls(data)

    @classmethod
    def load(cls, path=None, overrides=()) -> "ExperimentConfig":
        user = None
        if path is not None:
            with open(path) as fh:
                user = yaml.safe_load(fh) or {}
            if not isinstance(user, dict):
                raise ConfigError({str(path): "config file must hold a mapping"})
        return cls.from_dict(user, overrides)

    def with_overrides(self, *overrides) -> "ExperimentConfig":
        return ExperimentConfig.from_dict(self.data, overrides)

    def to_yaml(self, path=None) -> str:
        text = yaml.safe_dump(self.data, sort_keys=False)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def __getitem__(self, key):
        return self.data[key]

    # ---- typed views

    def scenario(self, seed=None, K=None, L=None) -> Scenario:
        s = self.data["scenario"]
        return generate_scenario(
            seed=s["seed"] if seed is None else seed,
            K=s["K"] if K is None else K,
            L=float(s["L_m"] if L is None else L),
            H=float(s["H_m"]),
            volume_range=(float(s["volume_min_bits"]), float(s["volume_max_bits"])),
            start=(float(s["start_x_m"]), float(s["start_y_m"])),
            gain_dbi=float(s["bd_gain_dbi"]),
        )

    def env_config(self, mode=None) -> EnvConfig:
        d = self.data
        return EnvConfig(
            channel=ChannelParams(**{k: float(v) for k, v in d["channel"].items()}),
            backscatter=BackscatterCoeff(**{k: float(v) for k, v in d["backscatter"].items()}),
            propulsion=PropulsionParams(**{k: float(v) for k, v in d["propulsion"].items()}),
            ma=MaParams(**{k: float(v) for k, v in d["ma"].items()}),
            energy_capacity_j=float(d["energy"]["capacity_j"]),
            comm_power_w=float(d["energy"]["comm_power_w"]),
            step_cap=int(d["env"]["step_cap"]),
            reward_per_bd=float(d["env"]["reward_per_bd"]),
            reward_finish=float(d["env"]["reward_finish"]),
            mode=d["mode"] if mode is None else mode,
        )

    def sac_config(self) -> SacConfig:
        return SacConfig(**self.data["sac"])

    def ac_config(self) -> AcConfig:
        return AcConfig(**self.data["ac"])

    @property
    def mode(self) -> str:
        return self.data["mode"]

    @property
    def agent_seed(self) -> int:
        return self.data["agent_seed"]
