"""Episodic data-collection MDP for a UAV with a movable (or fixed) antenna.

One decision step = fly one leg, then hover and serve every qualified BD.
Agents exchange normalized actions in ``[-1, 1]^n`` (``n = 4`` with the
movable antenna, ``n = 2`` with the fixed omni antenna) and observe the
state scaled into ``[0, 1]``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .energy import EnergyLedger, MaParams, PropulsionParams, hover_power, ma_move, propulsion_power
from .errors import ParameterError, UsageError
from .link import BackscatterCoeff, ChannelParams, budgets_from, collection_time
from .world import TWO_PI, Scenario, aim_angles, observe_bds, wrap_angle

MODES = ("MA", "FPA")


@dataclass(frozen=True)
class EnvConfig:
    channel: ChannelParams = field(default_factory=ChannelParams)
    backscatter: BackscatterCoeff = field(default_factory=BackscatterCoeff)
    propulsion: PropulsionParams = field(default_factory=PropulsionParams)
    ma: MaParams = field(default_factory=MaParams)
    energy_capacity_j: float = 200e3
    comm_power_w: float = 1.0
    step_cap: int = 60
    reward_per_bd: float = 50.0
    reward_finish: float = 500.0
    mode: str = "MA"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.step_cap < 1:
            raise ParameterError("step_cap must be >= 1")

    @property
    def action_dim(self) -> int:
        return 4 if self.mode == "MA" else 2

    def with_mode(self, mode: str) -> "EnvConfig":
        return replace(self, mode=mode)


@dataclass(frozen=True)
class EnvState:
    uav_xy: tuple
    collected: np.ndarray
    azimuths: np.ndarray
    distances: np.ndarray

    def vector(self, L: float) -> np.ndarray:
        """Flat observation with every feature scaled into ``[0, 1]``."""
        return np.concatenate((
            np.asarray(self.uav_xy, dtype=float) / L,
            self.collected.astype(float),
            self.azimuths / TWO_PI,
            self.distances / L,
        ))


class EnvAction(NamedTuple):
    a_f: float
    a_r: float
    theta_init: float = 0.0
    phi_init: float = 0.0


def map_action(u, mode: str = "MA") -> EnvAction:
    """Affinely map a normalized ``[-1, 1]^n`` vector onto the action ranges."""
    u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
    a_f = 0.5 * (u[0] + 1.0)
    a_r = math.pi * (u[1] + 1.0)
    if mode == "FPA":
        return EnvAction(float(a_f), float(a_r))
    theta = 0.25 * math.pi * (u[2] + 1.0)
    phi = wrap_angle(math.pi * (u[3] + 1.0))
    return EnvAction(float(a_f), float(a_r), float(theta), float(phi))


def apply_move(xy, a_f: float, a_r: float, L: float, speed: float):
    """Fly ``a_f * sqrt(2) * L`` metres along heading ``a_r``, clipped into the area.

    Returns ``(new_xy, flown_distance, flight_time)``; the distance is the
    actual displacement after clipping.
    """
    step = a_f * math.sqrt(2.0) * L
    cx = xy[0] + step * math.cos(a_r)
    cy = xy[1] + step * math.sin(a_r)
    nx = min(max(cx, 0.0), L)
    ny = min(max(cy, 0.0), L)
    d_u = math.hypot(nx - xy[0], ny - xy[1])
    return (nx, ny), d_u, d_u / speed


@dataclass
class ServiceReport:
    served_ids: list
    ma_targets: list
    t_ma: float
    t_bc: float
    e_ma: float
    e_comm: float
    e_hover: float
    orientation: tuple
    ma_moves: list = field(default_factory=list)
    bc_times: list = field(default_factory=list)

    @property
    def n_s(self) -> int:
        return len(self.served_ids)


def qualified_mask(xy, scenario: Scenario, config: EnvConfig):
    """Which BDs meet both sensitivity constraints from ``xy`` (antenna aimed at each)."""
    xi = config.backscatter.xi
    g_tr = config.channel.gain_for(config.mode)
    return budgets_from(xy, scenario.H, scenario.positions, config.channel, xi, g_tr, scenario.gains_dbi)


def serve_hover_point(xy, orientation, theta_init: float, phi_init: float, collected,
                      scenario: Scenario, config: EnvConfig) -> ServiceReport:
    """Reorient to the initial pose, then serve every qualified uncollected BD.

    With the movable antenna, devices are visited greedily by the smallest
    next reorientation time (ties to the lower id). The UAV hovers for the
    whole service, so hover power accrues over reorientation and
    collection time alike.
    """
    ok, rates, _ = qualified_mask(xy, scenario, config)
    pending = [k for k in range(scenario.K) if ok[k] and not collected[k]]
    volumes = scenario.volumes
    moves, bc_times, targets, served = [], [], [], []
    pose = (float(orientation[0]), float(orientation[1]))

    if config.mode == "MA":
        init = (theta_init, phi_init)
        moves.append(ma_move(pose, init, config.ma))
        pose = init
        uav = (xy[0], xy[1], scenario.H)
        aims = {k: aim_angles(uav, scenario.bds[k].position) for k in pending}
        while pending:
            times = [ma_move(pose, aims[k], config.ma).time_s for k in pending]
            k = pending.pop(int(np.argmin(times)))
            moves.append(ma_move(pose, aims[k], config.ma))
            pose = aims[k]
            targets.append(aims[k])
            bc_times.append(collection_time(float(volumes[k]), float(rates[k])))
            served.append(k)
    else:
        for k in pending:
            bc_times.append(collection_time(float(volumes[k]), float(rates[k])))
            served.append(k)

    t_ma = sum(m.time_s for m in moves)
    t_bc = sum(bc_times)
    return ServiceReport(
        served_ids=served,
        ma_targets=targets,
        t_ma=t_ma,
        t_bc=t_bc,
        e_ma=sum(m.energy_j for m in moves),
        e_comm=config.comm_power_w * t_bc,
        e_hover=hover_power(config.propulsion) * (t_ma + t_bc),
        orientation=pose,
        ma_moves=moves,
        bc_times=bc_times,
    )


def compute_reward(n_s: int, finished: bool, t_fly: float, t_ma: float, t_bc: float,
                   config: EnvConfig) -> dict:
    """The five reward terms; ``total`` is their sum.

    ``t_fly`` is the flight time of the leg that led to this hover point.
    """
    terms = {
        "r_b": n_s * config.reward_per_bd,
        "r_f": config.reward_finish if finished else 0.0,
        "p_f": -t_fly,
        "p_ma": -t_ma,
        "p_c": -t_bc,
    }
    terms["total"] = terms["r_b"] + terms["r_f"] + terms["p_f"] + terms["p_ma"] + terms["p_c"]
    return terms


@dataclass(frozen=True)
class StepOutcome:
    next_state: EnvState
    reward: float
    done: bool
    info: dict


@dataclass(frozen=True)
class EpisodeSummary:
    T_f: float
    T_BC: float
    T_MA: float
    total_time: float
    total_energy: float
    flight_distance: float
    success: bool
    steps: int
    hover_points: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def summarize(records, ledger=None) -> EpisodeSummary:
    """Fold per-step ``info`` records into mission totals."""
    if not records:
        raise UsageError("no steps recorded")
    t_f = float(sum(r["t_fly"] for r in records))
    t_bc = float(sum(r["t_bc"] for r in records))
    t_ma = float(sum(r["t_ma"] for r in records))
    energy = ledger.total if ledger is not None else sum(sum(r["energies"].values()) for r in records)
    energy = float(energy)
    return EpisodeSummary(
        T_f=t_f,
        T_BC=t_bc,
        T_MA=t_ma,
        total_time=t_f + t_bc + t_ma,
        total_energy=energy,
        flight_distance=float(sum(r["d_u"] for r in records)),
        success=bool(records[-1]["success"]),
        steps=len(records),
        hover_points=sum(1 for r in records if r["n_s"] > 0),
    )


class CollectionEnv:
    """Single-UAV data-collection episode over a fixed scenario."""

    def __init__(self, scenario: Scenario, config: EnvConfig | None = None):
        self.scenario = scenario
        self.config = config or EnvConfig()
        self.L = scenario.L
        self._flight_power = propulsion_power(self.config.propulsion, self.config.propulsion.uav_speed_mps)
        self._state = None
        self.done = True

    @property
    def action_dim(self) -> int:
        return self.config.action_dim

    @property
    def state_dim(self) -> int:
        return 2 + 3 * self.scenario.K

    def observe(self, xy, collected) -> EnvState:
        d, phi = observe_bds(xy, self.scenario)
        return EnvState(tuple(xy), collected.copy(), phi, d)

    def reset(self) -> EnvState:
        self.ledger = EnergyLedger(self.config.energy_capacity_j, self.config.comm_power_w)
        self.orientation = (0.0, 0.0)
        self.step_index = 0
        self.records = []
        self.done = False
        self._state = self.observe(self.scenario.start, np.zeros(self.scenario.K, dtype=bool))
        return self._state

    @property
    def state(self) -> EnvState:
        return self._state

    def observation(self, state: EnvState | None = None) -> np.ndarray:
        return (state or self._state).vector(self.L)

    def step(self, action) -> StepOutcome:
        """Advance one decision step.

        ``action`` is either an :class:`EnvAction` in physical units or a
        normalized vector in ``[-1, 1]^action_dim``.
        """
        if self.done:
            raise UsageError("episode finished; call reset()")
        cfg = self.config
        if isinstance(action, EnvAction):
            act = action
        else:
            u = np.asarray(action, dtype=float).ravel()
            if u.shape != (self.action_dim,):
                raise ParameterError(f"expected action of length {self.action_dim}, got {u.shape}")
            act = map_action(u, cfg.mode)
        state = self._state
        start_xy = state.uav_xy

        xy, d_u, t_fly = apply_move(start_xy, act.a_f, act.a_r, self.L, cfg.propulsion.uav_speed_mps)
        e_before = self.ledger.as_dict()
        self.ledger.charge("flight", self._flight_power, t_fly)

        report = serve_hover_point(xy, self.orientation, act.theta_init, act.phi_init,
                                   state.collected, self.scenario, cfg)
        hover_w = hover_power(cfg.propulsion)
        for m in report.ma_moves:
            self.ledger.charge("ma", m.power_w, m.time_s)
        self.ledger.charge("comm", cfg.comm_power_w, report.t_bc)
        self.ledger.charge("hover", hover_w, report.t_ma + report.t_bc)
        self.orientation = report.orientation

        collected = state.collected.copy()
        collected[report.served_ids] = True
        all_done = bool(collected.all())
        feasible = self.ledger.feasible
        finished = all_done and report.n_s > 0 and feasible
        terms = compute_reward(report.n_s, finished, t_fly, report.t_ma, report.t_bc, cfg)

        self.step_index += 1
        terminal = all_done or not feasible
        truncated = (not terminal) and self.step_index >= cfg.step_cap
        self.done = terminal or truncated
        e_after = self.ledger.as_dict()

        info = {
            "step": self.step_index,
            "from_xy": list(start_xy),
            "xy": list(xy),
            "action": list(act),
            "n_s": report.n_s,
            "served_ids": list(report.served_ids),
            "ma_targets": [list(t) for t in report.ma_targets],
            "d_u": d_u,
            "t_fly": t_fly,
            "t_ma": report.t_ma,
            "t_bc": report.t_bc,
            "energies": {c: e_after[c] - e_before[c] for c in e_after},
            "reward_terms": terms,
            "terminal": terminal,
            "truncated": truncated,
            "success": all_done and feasible,
            "energy_feasible": feasible,
        }
        self.records.append(info)
        self._state = self.observe(xy, collected)
        return StepOutcome(self._state, terms["total"], self.done, info)

    def summary(self) -> EpisodeSummary:
        return summarize(self.records, self.ledger)


def export_trace_jsonl(records, path) -> None:
    """One JSON object per step."""
    keys = ("step", "xy", "action", "reward", "n_s", "t_fly", "t_ma", "t_bc", "served_ids", "energies")
    with open(path, "w") as fh:
        for r in records:
            row = {k: r[k] for k in keys if k != "reward"}
            row["reward"] = r["reward_terms"]["total"]
            fh.write(json.dumps({k: row[k] for k in keys}) + "\n")


TRAJECTORY_COLUMNS = ("episode", "step", "from_x", "from_y", "x", "y", "leg_m", "n_s", "served_ids", "ma_targets")


def trajectory_rows(records, episode: int = 0):
    for r in records:
        yield {
            "episode": episode,
            "step": r["step"],
            "from_x": r["from_xy"][0],
            "from_y": r["from_xy"][1],
            "x": r["xy"][0],
            "y": r["xy"][1],
            "leg_m": r["d_u"],
            "n_s": r["n_s"],
            "served_ids": ";".join(str(k) for k in r["served_ids"]),
            "ma_targets": ";".join(f"{t[0]!r}/{t[1]!r}" for t in r["ma_targets"]),
        }


def export_trajectory_csv(records, path, episode: int = 0, append: bool = False) -> None:
    """Hover points, legs and antenna targets, one row per step."""
    with open(path, "a" if append else "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TRAJECTORY_COLUMNS)
        if not append:
            w.writeheader()
        for row in trajectory_rows(records, episode):
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
