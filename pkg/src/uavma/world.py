"""Geometry, scenario generation and aiming/observation primitives.

All angles are radians. Azimuths are normalized into ``[0, 2*pi)``; the
elevation of a device directly below the UAV is clamped to ``pi/2`` with
azimuth ``0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParameterError

TWO_PI = 2.0 * math.pi


def wrap_angle(phi):
    """Map an angle (scalar or array) into ``[0, 2*pi)``."""
    out = np.mod(phi, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class BdSpec:
    """One backscatter device on the ground (z = 0)."""

    id: int
    x: float
    y: float
    volume_bits: float
    gain_dbi: float = 0.0

    @property
    def position(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class UavPose:
    x: float
    y: float
    h: float
    ma_theta: float = 0.0
    ma_phi: float = 0.0


@dataclass(frozen=True)
class Scenario:
    """Immutable world description.

    Serializes to ``{L, H, start: [x, y], seed, bds: [{id, x, y,
    volume_bits, gain_dbi}]}``.
    """

    L: float
    H: float
    bds: tuple
    start: tuple = (0.0, 0.0)
    seed: int = 0
    _positions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "bds", tuple(self.bds))
        object.__setattr__(self, "start", (float(self.start[0]), float(self.start[1])))
        if not self.L > 0:
            raise ParameterError(f"area side L must be positive, got {self.L}")
        if not self.H > 0:
            raise ParameterError(f"altitude H must be positive, got {self.H}")
        if len(self.bds) < 1:
            raise ParameterError("scenario needs at least one BD")
        ids = [b.id for b in self.bds]
        if ids != list(range(len(ids))):
            raise ParameterError(f"BD ids must be contiguous 0..K-1 in order, got {ids}")
        for b in self.bds:
            if not (0.0 <= b.x <= self.L and 0.0 <= b.y <= self.L):
                raise ParameterError(f"BD {b.id} at ({b.x}, {b.y}) lies outside [0, {self.L}]^2")
            if not b.volume_bits > 0:
                raise ParameterError(f"BD {b.id} data volume must be positive")
        sx, sy = self.start
        if not (0.0 <= sx <= self.L and 0.0 <= sy <= self.L):
            raise ParameterError(f"start {self.start} lies outside the area")
        pos = np.array([[b.x, b.y] for b in self.bds], dtype=float)
        pos.setflags(write=False)
        object.__setattr__(self, "_positions", pos)

    @property
    def K(self) -> int:
        return len(self.bds)

    @property
    def positions(self) -> np.ndarray:
        """``(K, 2)`` read-only array of BD ground coordinates."""
        return self._positions

    @property
    def volumes(self) -> np.ndarray:
        return np.array([b.volume_bits for b in self.bds], dtype=float)

    @property
    def gains_dbi(self) -> np.ndarray:
        return np.array([b.gain_dbi for b in self.bds], dtype=float)

    @property
    def d_max(self) -> float:
        return math.sqrt(2.0) * self.L

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "H": self.H,
            "start": list(self.start),
            "seed": self.seed,
            "bds": [
                {"id": b.id, "x": b.x, "y": b.y, "volume_bits": b.volume_bits, "gain_dbi": b.gain_dbi}
                for b in self.bds
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        bds = tuple(
            BdSpec(int(b["id"]), float(b["x"]), float(b["y"]), float(b["volume_bits"]), float(b.get("gain_dbi", 0.0)))
            for b in d["bds"]
        )
        return cls(L=float(d["L"]), H=float(d["H"]), bds=bds, start=tuple(d.get("start", (0.0, 0.0))),
                   seed=int(d.get("seed", 0)))

    def to_json(self, path=None, indent=2) -> str:
        text = json.dumps(self.to_dict(), indent=indent)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    @classmethod
    def from_json(cls, source) -> "Scenario":
        """Load from a JSON string or a file path."""
        text = str(source)
        if not text.lstrip().startswith("{"):
            with open(source) as fh:
                text = fh.read()
        return cls.from_dict(json.loads(text))


def generate_scenario(seed: int, K: int, L: float, H: float = 30.0,
                      volume_range: Sequence[float] = (1e5, 5e5),
                      start=(0.0, 0.0), gain_dbi: float = 0.0) -> Scenario:
    """Place ``K`` BDs uniformly in ``[0, L]^2`` with uniform data volumes.

    Draws come from a Philox (counter-based) stream, one ``(x, y, volume)``
    triple per BD, so the first ``k`` devices of a larger scenario coincide
    with the devices of a smaller one built from the same seed.
    """
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    if not (L > 0 and H > 0):
        raise ParameterError(f"L and H must be positive, got L={L}, H={H}")
    lo, hi = float(volume_range[0]), float(volume_range[1])
    if not (0 < lo < hi):
        raise ParameterError(f"volume range must satisfy 0 < low < high, got {volume_range}")
    if seed < 0:
        raise ParameterError("seed must be non-negative")
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random((K, 3))
    bds = tuple(
        BdSpec(k, float(L * u[k, 0]), float(L * u[k, 1]), float(lo + (hi - lo) * u[k, 2]), float(gain_dbi))
        for k in range(K)
    )
    return Scenario(L=float(L), H=float(H), bds=bds, start=start, seed=int(seed))


def aim_angles(uav, bd):
    """Elevation and azimuth that point the antenna main lobe at ``bd``.

    ``uav`` is ``(x, y, h)``; ``bd`` is ``(p_x, p_y)``.
    """
    x, y, h = uav
    dx = bd[0] - x
    dy = bd[1] - y
    horiz = math.hypot(dx, dy)
    if horiz == 0.0:
        return math.pi / 2, 0.0
    return math.atan2(h, horiz), wrap_angle(math.atan2(dy, dx))


def slant_range(uav, bd) -> float:
    x, y, h = uav
    return math.sqrt((x - bd[0]) ** 2 + (y - bd[1]) ** 2 + h * h)


def observe_bds(uav_xy, bds):
    """Horizontal distances and azimuths from the UAV to each BD.

    ``bds`` is a ``(K, 2)`` array (or a Scenario). Returns two length-K
    arrays ordered by BD id; a coincident BD gets azimuth 0.
    """
    pos = bds.positions if isinstance(bds, Scenario) else np.asarray(bds, dtype=float).reshape(-1, 2)
    dx = pos[:, 0] - uav_xy[0]
    dy = pos[:, 1] - uav_xy[1]
    d = np.hypot(dx, dy)
    phi = np.where(d == 0.0, 0.0, wrap_angle(np.arctan2(dy, dx)))
    return d, phi


def elevations(horiz, h):
    """Vectorized elevation angle for horizontal distances ``horiz``."""
    horiz = np.asarray(horiz, dtype=float)
    return np.arctan2(h, horiz)
