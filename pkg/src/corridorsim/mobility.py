"""Closed-form trajectories for the patrol UE and the intruder UAV.

The patrol walks the corridor perimeter counterclockwise at constant speed.
The UAV flies a straight ingress from outside the corridor to a rectangular
loiter racetrack and then laps it, also counterclockwise. Both paths are pure
functions of time, so runs can evaluate any step independently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .geometry import Position, WorldGeometry, in_zone

PATROL_ALTITUDE_M = 1.5


@dataclass(frozen=True)
class MobilityConfig:
    patrol_speed_mps: float = 5.0
    # Loiter hugs the gNB0/gNB1 equal-power line (x = 625) so the intruder
    # keeps producing handover opportunities; see default_world() for the map.
    uav_ingress_start: Position = field(default_factory=lambda: Position(625.0, -10.0, 0.0))
    uav_loiter_center: Position = field(default_factory=lambda: Position(625.0, 160.0, 0.0))
    uav_loiter_half_length_m: float = 10.0
    uav_loiter_half_width_m: float = 60.0

    def __post_init__(self):
        if self.patrol_speed_mps <= 0:
            raise ValueError("patrol_speed_mps must be > 0")
        if self.uav_loiter_half_length_m <= 0 or self.uav_loiter_half_width_m <= 0:
            raise ValueError("loiter racetrack half dimensions must be > 0")


@dataclass(frozen=True, slots=True)
class UePose:
    position: Position
    in_corridor: bool
    in_nfz: bool


def patrol_position(t: float, world: WorldGeometry, cfg: MobilityConfig) -> Position:
    """Patrol location at time t: corridor perimeter, CCW from (x_min, y_min)."""
    c = world.corridor
    w = c.x_max - c.x_min
    h = c.y_max - c.y_min
    perimeter = 2.0 * (w + h)
    s = (t * cfg.patrol_speed_mps) % perimeter
    if s < w:
        return Position(c.x_min + s, c.y_min, PATROL_ALTITUDE_M)
    s -= w
    if s < h:
        return Position(c.x_max, c.y_min + s, PATROL_ALTITUDE_M)
    s -= h
    if s < w:
        return Position(c.x_max - s, c.y_max, PATROL_ALTITUDE_M)
    s -= w
    return Position(c.x_min, c.y_max - s, PATROL_ALTITUDE_M)


def _racetrack_bounds(cfg: MobilityConfig) -> tuple[float, float, float, float]:
    cx, cy = cfg.uav_loiter_center.x, cfg.uav_loiter_center.y
    return (
        cx - cfg.uav_loiter_half_length_m,
        cx + cfg.uav_loiter_half_length_m,
        cy - cfg.uav_loiter_half_width_m,
        cy + cfg.uav_loiter_half_width_m,
    )


def ingress_distance(cfg: MobilityConfig) -> float:
    """Path length from the ingress start to where the ray toward the loiter
    center first meets the racetrack boundary."""
    x0, x1, y0, y1 = _racetrack_bounds(cfg)
    sx, sy = cfg.uav_ingress_start.x, cfg.uav_ingress_start.y
    dx = cfg.uav_loiter_center.x - sx
    dy = cfg.uav_loiter_center.y - sy
    length = math.hypot(dx, dy)
    if length == 0:
        raise ValueError("ingress start must differ from the loiter center")
    ux, uy = dx / length, dy / length
    entry = 0.0
    for lo, hi, s0, u in ((x0, x1, sx, ux), (y0, y1, sy, uy)):
        if abs(u) < 1e-12:
            if not (lo <= s0 <= hi):
                raise ValueError("ingress ray never reaches the racetrack")
            continue
        entry = max(entry, min((lo - s0) / u, (hi - s0) / u))
    return entry


def _racetrack_arc(x: float, y: float, x0: float, x1: float, y0: float, y1: float) -> float:
    """Arc length of a boundary point along the CCW lap starting at (x0, y0)."""
    w, h = x1 - x0, y1 - y0
    tol = 1e-6
    if abs(y - y0) < tol:
        return x - x0
    if abs(x - x1) < tol:
        return w + (y - y0)
    if abs(y - y1) < tol:
        return w + h + (x1 - x)
    return 2.0 * w + h + (y1 - y)


@lru_cache(maxsize=64)
def _uav_path_params(cfg: MobilityConfig) -> tuple[float, ...]:
    x0, x1, y0, y1 = _racetrack_bounds(cfg)
    sx, sy = cfg.uav_ingress_start.x, cfg.uav_ingress_start.y
    dx = cfg.uav_loiter_center.x - sx
    dy = cfg.uav_loiter_center.y - sy
    length = math.hypot(dx, dy)
    ux, uy = dx / length, dy / length
    d_ingress = ingress_distance(cfg)
    entry_arc = _racetrack_arc(sx + ux * d_ingress, sy + uy * d_ingress, x0, x1, y0, y1)
    return sx, sy, ux, uy, d_ingress, entry_arc, x0, x1, y0, y1


def uav_position(
    t: float, speed: float, altitude: float, world: WorldGeometry, cfg: MobilityConfig
) -> Position:
    """UAV location at time t: ingress line, then periodic racetrack laps.

    Altitude is constant throughout; the trajectory is continuous in t.
    """
    if speed <= 0 or altitude <= 0:
        raise ValueError("speed and altitude must be > 0")
    sx, sy, ux, uy, d_ingress, entry_arc, x0, x1, y0, y1 = _uav_path_params(cfg)
    s = t * speed
    if s <= d_ingress:
        return Position(sx + ux * s, sy + uy * s, altitude)
    w, h = x1 - x0, y1 - y0
    a = (entry_arc + (s - d_ingress)) % (2.0 * (w + h))
    if a < w:
        return Position(x0 + a, y0, altitude)
    a -= w
    if a < h:
        return Position(x1, y0 + a, altitude)
    a -= h
    if a < w:
        return Position(x1 - a, y1, altitude)
    a -= w
    return Position(x0, y1 - a, altitude)


def pose(position: Position, world: WorldGeometry) -> UePose:
    return UePose(
        position=position,
        in_corridor=in_zone(position, world.corridor),
        in_nfz=any(in_zone(position, z) for z in world.nfzs),
    )
