"""Air-to-ground channel, monostatic backscatter link budget and data rate.

Losses are in dB, powers in dBm unless a name says otherwise. The LoS
probability uses the elevation angle in degrees in the usual logistic
form ``1 / (1 + a * exp(-b * (theta_deg - a)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleLinkError, ParameterError
from .world import elevations, observe_bds

SPEED_OF_LIGHT = 299_792_458.0


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def watts_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w) + 30.0


@dataclass(frozen=True)
class ChannelParams:
    carrier_freq_hz: float = 2e9
    env_rho: float = 9.61
    env_beta: float = 0.16
    eta_los_db: float = 1.0
    eta_nlos_db: float = 20.0
    noise_dbm: float = -100.0
    bandwidth_hz: float = 20e6
    carrier_power_w: float = 1.0
    reader_sens_dbm: float = -100.0
    bd_sens_dbm: float = -50.0
    reader_gain_dbi: float = 10.0
    fpa_gain_dbi: float = 5.0

    def __post_init__(self):
        if not self.carrier_freq_hz > 0:
            raise ParameterError("carrier_freq_hz must be positive")
        if not self.bandwidth_hz > 0:
            raise ParameterError("bandwidth_hz must be positive")
        if not self.carrier_power_w > 0:
            raise ParameterError("carrier_power_w must be positive")
        if self.eta_nlos_db < self.eta_los_db:
            raise ParameterError("eta_nlos_db must be >= eta_los_db")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq_hz

    @property
    def carrier_power_dbm(self) -> float:
        return watts_to_dbm(self.carrier_power_w)

    def gain_for(self, mode: str) -> float:
        """Reader antenna gain (dBi) for ``"MA"`` (aimed) or ``"FPA"`` (omni)."""
        if mode == "MA":
            return self.reader_gain_dbi
        if mode == "FPA":
            return self.fpa_gain_dbi
        raise ParameterError(f"unknown antenna mode {mode!r}")


@dataclass(frozen=True)
class BackscatterCoeff:
    """Polarization mismatch, modulation factor and on-object penalty (dB)."""

    chi: float = 0.5
    modulation_factor: float = 0.5
    on_object_penalty_db: float = 0.0

    def __post_init__(self):
        if not (0 < self.chi <= 1 and 0 < self.modulation_factor <= 1):
            raise ParameterError("chi and modulation_factor must lie in (0, 1]")
        if not 0 < self.xi <= 1:
            raise ParameterError(f"backscatter efficiency {self.xi} outside (0, 1]")

    @property
    def xi(self) -> float:
        penalty = 10.0 ** (self.on_object_penalty_db / 10.0)
        return self.chi ** 2 * self.modulation_factor / penalty ** 2


@dataclass(frozen=True)
class LinkBudget:
    bd_id: int
    elevation: float
    slant_r: float
    p_los: float
    mean_loss_db: float
    rx_power_bd_dbm: float
    rx_power_reader_dbm: float
    rate_bps: float


def los_probability(elevation, rho: float, beta: float):
    """LoS probability for an elevation angle in radians (scalar or array)."""
    deg = np.degrees(elevation)
    p = 1.0 / (1.0 + rho * np.exp(-beta * (deg - rho)))
    return float(p) if np.ndim(p) == 0 else p


def path_loss(r, wavelength: float, g_tr_dbi: float, g_bd_dbi, eta_db: float):
    """Free-space term with both antenna gains plus an excess loss ``eta_db``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ParameterError("distance must be positive")
    gains = np.sqrt(db_to_linear(g_tr_dbi) * db_to_linear(g_bd_dbi))
    out = 20.0 * np.log10(4.0 * math.pi * r / (wavelength * gains)) + eta_db
    return float(out) if np.ndim(out) == 0 else out


def mean_path_loss(r, elevation, params: ChannelParams, g_bd_dbi=0.0, g_tr_dbi=None):
    """LoS/NLoS-probability-weighted path loss, averaged in the dB domain."""
    if g_tr_dbi is None:
        g_tr_dbi = params.reader_gain_dbi
    p = los_probability(elevation, params.env_rho, params.env_beta)
    lam = params.wavelength_m
    l_los = path_loss(r, lam, g_tr_dbi, g_bd_dbi, params.eta_los_db)
    l_nlos = path_loss(r, lam, g_tr_dbi, g_bd_dbi, params.eta_nlos_db)
    return p * l_los + (1.0 - p) * l_nlos


def received_powers(params: ChannelParams, xi: float, mean_loss):
    """Carrier power arriving at the BD and backscatter power back at the reader (dBm)."""
    rx_bd = params.carrier_power_dbm - mean_loss
    rx_reader = rx_bd + linear_to_db(xi) - mean_loss
    return rx_bd, rx_reader


def qualifies(budget: LinkBudget, params: ChannelParams) -> bool:
    """Both sensitivity constraints, inclusive."""
    return bool(budget.rx_power_reader_dbm >= params.reader_sens_dbm
                and budget.rx_power_bd_dbm >= params.bd_sens_dbm)


def data_rate(params: ChannelParams, xi: float, mean_loss):
    """Shannon rate (bit/s) with SNR ``xi * Pc / Lbar^2 / N0`` in linear units."""
    pc_mw = params.carrier_power_w * 1e3
    n0_mw = 10.0 ** (params.noise_dbm / 10.0)
    loss_lin = db_to_linear(mean_loss)
    snr = xi * pc_mw / (loss_lin * loss_lin) / n0_mw
    out = params.bandwidth_hz * np.log2(1.0 + snr)
    return float(out) if np.ndim(out) == 0 else out


def collection_time(volume_bits: float, rate_bps: float) -> float:
    if volume_bits < 0:
        raise ParameterError("data volume must be non-negative")
    if not rate_bps > 0:
        raise InfeasibleLinkError(f"link rate {rate_bps} bit/s cannot carry data")
    return volume_bits / rate_bps


def link_budget(uav, bd, params: ChannelParams, xi: float, g_tr_dbi=None, bd_id: int = 0,
                g_bd_dbi: float = 0.0) -> LinkBudget:
    """Full budget for one UAV ``(x, y, h)`` / BD ``(p_x, p_y)`` pair."""
    x, y, h = uav
    horiz = math.hypot(bd[0] - x, bd[1] - y)
    elev = math.atan2(h, horiz)
    r = math.sqrt(horiz * horiz + h * h)
    loss = mean_path_loss(r, elev, params, g_bd_dbi, g_tr_dbi)
    rx_bd, rx_reader = received_powers(params, xi, loss)
    return LinkBudget(
        bd_id=bd_id,
        elevation=elev,
        slant_r=r,
        p_los=los_probability(elev, params.env_rho, params.env_beta),
        mean_loss_db=loss,
        rx_power_bd_dbm=rx_bd,
        rx_power_reader_dbm=rx_reader,
        rate_bps=data_rate(params, xi, loss),
    )


def budgets_from(uav_xy, H: float, positions, params: ChannelParams, xi: float, g_tr_dbi: float,
                 g_bd_dbi=0.0):
    """Vectorized budgets for every BD.

    Returns ``(qualified_mask, rate_bps, mean_loss_db)`` arrays of length K.
    """
    horiz, _ = observe_bds(uav_xy, positions)
    r = np.sqrt(horiz * horiz + H * H)
    loss = mean_path_loss(r, elevations(horiz, H), params, g_bd_dbi, g_tr_dbi)
    rx_bd, rx_reader = received_powers(params, xi, loss)
    ok = (rx_reader >= params.reader_sens_dbm) & (rx_bd >= params.bd_sens_dbm)
    return ok, data_rate(params, xi, loss), loss
