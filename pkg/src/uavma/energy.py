"""Rotary-wing propulsion power, antenna actuation cost and the energy ledger."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import NamedTuple

from .errors import ParameterError
from .world import TWO_PI

COMPONENTS = ("flight", "hover", "comm", "ma")


@dataclass(frozen=True)
class PropulsionParams:
    tip_speed_mps: float = 80.0
    hover_induced_velocity_mps: float = 5.0463
    air_density_kgpm3: float = 1.225
    rotor_solidity: float = 0.1248
    disc_area_m2: float = 0.1256
    fuselage_drag_ratio: float = 0.5009
    profile_drag_coeff: float = 0.012
    blade_angular_velocity_radps: float = 400.0
    rotor_radius_m: float = 0.2
    induced_power_correction: float = 0.05
    weight_n: float = 7.84
    uav_speed_mps: float = 10.0

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ParameterError(f"{f.name} must be positive")


@dataclass(frozen=True)
class MaParams:
    base_power_w: float = 2.0
    zeta_w_per_rad: float = 0.05
    kappa_w_per_rad: float = 0.03
    v_theta_radps: float = math.pi
    v_phi_radps: float = math.pi

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ParameterError(f"{f.name} must be positive")


def rotor_constants(p: PropulsionParams):
    """Blade-profile power ``P0`` and induced power ``P1`` in hover (W)."""
    p0 = (p.profile_drag_coeff * p.air_density_kgpm3 * p.blade_angular_velocity_radps ** 3
          * p.rotor_radius_m ** 3 * p.disc_area_m2 / 8.0)
    p1 = ((1.0 + p.induced_power_correction) * p.weight_n ** 1.5
          / math.sqrt(2.0 * p.air_density_kgpm3 * p.disc_area_m2))
    return p0, p1


def propulsion_power(p: PropulsionParams, v: float) -> float:
    """Power (W) to fly level at speed ``v``; ``v = 0`` gives hover power."""
    if v < 0:
        raise ParameterError(f"speed must be non-negative, got {v}")
    p0, p1 = rotor_constants(p)
    blade = p0 * (1.0 + 3.0 * v * v / p.tip_speed_mps ** 2)
    v0 = p.hover_induced_velocity_mps
    induced = p1 * math.sqrt(math.sqrt(1.0 + v ** 4 / (4.0 * v0 ** 4)) - v * v / (2.0 * v0 * v0))
    parasite = (0.5 * p.air_density_kgpm3 * p.fuselage_drag_ratio * p.rotor_solidity
                * p.disc_area_m2 * v ** 3)
    return blade + induced + parasite


def hover_power(p: PropulsionParams) -> float:
    return propulsion_power(p, 0.0)


def azimuth_delta(a: float, b: float) -> float:
    """Shortest angular distance between two azimuths, in ``[0, pi]``."""
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


class MaMove(NamedTuple):
    dtheta: float
    dphi: float
    time_s: float
    power_w: float
    energy_j: float


def ma_move(start, target, ma: MaParams) -> MaMove:
    """Cost of rotating the antenna from ``start`` to ``target`` (both ``(theta, phi)``).

    Azimuth travel takes the short way round the 0/2*pi seam. A null move
    costs no time and therefore no energy.
    """
    dtheta = abs(target[0] - start[0])
    dphi = azimuth_delta(target[1], start[1])
    t = max(dtheta / ma.v_theta_radps, dphi / ma.v_phi_radps)
    power = ma.base_power_w + ma.zeta_w_per_rad * dtheta + ma.kappa_w_per_rad * dphi
    return MaMove(dtheta, dphi, t, power, power * t)


@dataclass
class EnergyLedger:
    """Running per-component energy totals (J) against a fixed capacity.

    The ledger keeps accruing after the capacity is exceeded; ``feasible``
    reports whether the budget still holds.
    """

    capacity_j: float = 200e3
    comm_power_w: float = 1.0
    flight: float = 0.0
    hover: float = 0.0
    comm: float = 0.0
    ma: float = 0.0
    charges: list = field(default_factory=list, repr=False)

    @property
    def total(self) -> float:
        return self.flight + self.hover + self.comm + self.ma

    @property
    def feasible(self) -> bool:
        return self.total <= self.capacity_j

    def charge(self, component: str, power_w: float, duration_s: float) -> bool:
        if component not in COMPONENTS:
            raise ParameterError(f"unknown energy component {component!r}")
        if power_w < 0 or duration_s < 0:
            raise ParameterError("power and duration must be non-negative")
        if duration_s > 0:
            setattr(self, component, getattr(self, component) + power_w * duration_s)
            self.charges.append((component, power_w, duration_s))
        return self.feasible

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in COMPONENTS}
