"""Scripted nearest-device planner used as a deterministic reference.

The UAV repeatedly heads for the nearest uncollected device and stops at
the first point on that leg from which the device qualifies, found by
bisection to a fixed 0.1 m resolution. Everything qualified there is
served before the next leg.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..env import CollectionEnv, EnvAction, EnvConfig, EpisodeSummary, apply_move, qualified_mask
from ..world import Scenario, aim_angles

STOP_RESOLUTION_M = 0.1


@dataclass
class BaselineResult:
    mode: str
    summary: EpisodeSummary
    records: list = field(repr=False)
    infeasible_ids: list = field(default_factory=list)

    @property
    def hover_xy(self) -> list:
        return [tuple(r["xy"]) for r in self.records if r["n_s"] > 0]


def _qualifies(xy, k: int, scenario: Scenario, config: EnvConfig) -> bool:
    return bool(qualified_mask(xy, scenario, config)[0][k])


def leg_action(xy, target, L: float):
    """``(a_f, a_r, length)`` for flying straight from ``xy`` to ``target``."""
    dx, dy = target[0] - xy[0], target[1] - xy[1]
    length = math.hypot(dx, dy)
    return length / (math.sqrt(2.0) * L), math.atan2(dy, dx) % (2.0 * math.pi), length


def stop_distance(xy, k: int, scenario: Scenario, config: EnvConfig, resolution=STOP_RESOLUTION_M):
    """Shortest distance along the leg toward device ``k`` at which it qualifies.

    Candidate points are produced by :func:`apply_move` so the planner and
    the environment agree on the exact landing coordinates. Returns None if
    the device does not qualify even at the end of the leg.
    """
    L = scenario.L
    speed = config.propulsion.uav_speed_mps
    _, a_r, length = leg_action(xy, scenario.bds[k].position, L)

    def point(s):
        return apply_move(xy, s / (math.sqrt(2.0) * L), a_r, L, speed)[0]

    if _qualifies(xy, k, scenario, config):
        return 0.0
    if not _qualifies(point(length), k, scenario, config):
        return None
    lo, hi = 0.0, length
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if _qualifies(point(mid), k, scenario, config):
            hi = mid
        else:
            lo = mid
    return hi


def _empty_summary() -> EpisodeSummary:
    return EpisodeSummary(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, False, 0, 0)


def greedy_baseline(scenario: Scenario, config: EnvConfig | None = None, mode: str | None = None,
                    resolution: float = STOP_RESOLUTION_M) -> BaselineResult:
    """Plan and fly the nearest-device mission in ``mode`` (``"MA"`` or ``"FPA"``).

    Devices that never qualify, even from directly overhead, are listed in
    ``infeasible_ids``; the rest of the mission still runs but cannot
    succeed. Each step serves at least its target, so the step cap is
    raised to ``K`` when needed.
    """
    config = config or EnvConfig()
    if mode is not None:
        config = config.with_mode(mode)
    config = replace(config, step_cap=max(config.step_cap, scenario.K))
    env = CollectionEnv(scenario, config)
    env.reset()

    overhead = [_qualifies(b.position, b.id, scenario, config) for b in scenario.bds]
    infeasible = [k for k, ok in enumerate(overhead) if not ok]

    while not env.done:
        state = env.state
        xy = state.uav_xy
        pending = [k for k in range(scenario.K) if overhead[k] and not state.collected[k]]
        if not pending:
            break
        dist = state.distances[pending]
        k = pending[int(np.argmin(dist))]  # argmin keeps the lower id on ties
        s = stop_distance(xy, k, scenario, config, resolution)
        if s is None:
            infeasible.append(k)
            overhead[k] = False
            continue
        _, a_r, _ = leg_action(xy, scenario.bds[k].position, scenario.L)
        a_f = s / (math.sqrt(2.0) * scenario.L)
        if config.mode == "MA":
            stop = apply_move(xy, a_f, a_r, scenario.L, config.propulsion.uav_speed_mps)[0]
            ok = qualified_mask(stop, scenario, config)[0] & ~state.collected
            d_stop = np.hypot(*(scenario.positions - np.asarray(stop)).T)
            first = int(np.flatnonzero(ok)[np.argmin(d_stop[ok])])
            theta, phi = aim_angles((stop[0], stop[1], scenario.H), scenario.bds[first].position)
            action = EnvAction(a_f, a_r, theta, phi)
        else:
            action = EnvAction(a_f, a_r)
        env.step(action)

    summary = env.summary() if env.records else _empty_summary()
    return BaselineResult(config.mode, summary, env.records, sorted(set(infeasible)))
