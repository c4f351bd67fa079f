"""Static world geometry: corridor, no-fly zones, and gNB sites.

All coordinates are meters in a flat local frame. The canonical map used by
every default run is fixed here so that results are reproducible; see
``default_world``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .backhaul import Backhaul


@dataclass(frozen=True, slots=True)
class Position:
    """A point in the local frame; z is altitude above ground."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError("position coordinates must be finite")
        if self.z < 0:
            raise ValueError("position z must be >= 0")


@dataclass(frozen=True)
class ZoneRect:
    """Axis-aligned ground rectangle (altitude ignored)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("zone rectangle must have x_min < x_max and y_min < y_max")


@dataclass(frozen=True)
class GnbSite:
    """One base-station site; position.z is the antenna height."""

    id: int
    position: Position
    tx_power_dbm: float = 46.0
    backhaul: Backhaul = Backhaul.TERRESTRIAL


@dataclass(frozen=True)
class WorldGeometry:
    corridor: ZoneRect
    nfzs: tuple[ZoneRect, ...] = ()
    gnbs: tuple[GnbSite, ...] = ()

    def __post_init__(self):
        if len(self.gnbs) < 1:
            raise ValueError("world needs at least one gNB")
        ids = [g.id for g in self.gnbs]
        if ids != list(range(len(self.gnbs))):
            raise ValueError("gNB ids must be contiguous from 0")


def in_zone(pos: Position, zone: ZoneRect) -> bool:
    """Closed-rectangle membership; boundary points count as inside."""
    return zone.x_min <= pos.x <= zone.x_max and zone.y_min <= pos.y <= zone.y_max


def default_world() -> WorldGeometry:
    """The canonical map: 2000 m x 400 m corridor, three gNBs, two NFZs."""
    gnbs = tuple(
        GnbSite(id=i, position=Position(x, 200.0, 25.0))
        for i, x in enumerate((250.0, 1000.0, 1750.0))
    )
    nfzs = (
        ZoneRect(500.0, 700.0, 225.0, 375.0),   # 200 x 150 centered at (600, 300)
        ZoneRect(1300.0, 1500.0, 25.0, 175.0),  # 200 x 150 centered at (1400, 100)
    )
    return WorldGeometry(corridor=ZoneRect(0.0, 2000.0, 0.0, 400.0), nfzs=nfzs, gnbs=gnbs)
