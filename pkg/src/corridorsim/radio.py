"""Per-gNB RSRP: free-space path loss, i.i.d. shadowing, antenna penalties,
and the downlink degradation a nearby UAV imposes on the patrol UE."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import GnbSite, Position, WorldGeometry


@dataclass(frozen=True)
class RadioConfig:
    shadowing_sigma_db: float = 4.0
    aerial_penalty_db: float = 5.0
    ground_penalty_db: float = 0.0
    interference_radius_m: float = 300.0
    interference_db_pre_lock: float = 3.0
    interference_db_post_lock: float = 1.0

    def __post_init__(self):
        for name in (
            "shadowing_sigma_db",
            "aerial_penalty_db",
            "ground_penalty_db",
            "interference_radius_m",
            "interference_db_pre_lock",
            "interference_db_post_lock",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.interference_db_post_lock > self.interference_db_pre_lock:
            raise ValueError("interference_db_post_lock must be <= interference_db_pre_lock")


@dataclass(frozen=True, slots=True)
class RadioSample:
    """Raw per-gNB RSRP measurements for one UE at one step, indexed by gNB id."""

    rsrp_dbm: tuple[float, ...]

    def __post_init__(self):
        if not self.rsrp_dbm:
            raise ValueError("sample must cover at least one gNB")
        if not all(math.isfinite(v) for v in self.rsrp_dbm):
            raise ValueError("RSRP values must be finite")


def fspl_db(distance_m: float, carrier_hz: float) -> float:
    """Free-space path loss; distances below 1 m are clamped to 1 m."""
    d_km = max(distance_m, 1.0) / 1000.0
    f_mhz = carrier_hz / 1e6
    return 32.44 + 20.0 * math.log10(d_km) + 20.0 * math.log10(f_mhz)


def rsrp_dbm(
    gnb: GnbSite,
    ue_pos: Position,
    ue_is_aerial: bool,
    shadow_db: float,
    cfg: RadioConfig,
    carrier_hz: float,
) -> float:
    """RSRP over the 3-D link distance, with the UE-class antenna penalty."""
    g = gnb.position
    dist = math.sqrt((ue_pos.x - g.x) ** 2 + (ue_pos.y - g.y) ** 2 + (ue_pos.z - g.z) ** 2)
    penalty = cfg.aerial_penalty_db if ue_is_aerial else cfg.ground_penalty_db
    return gnb.tx_power_dbm - fspl_db(dist, carrier_hz) - penalty + shadow_db


def sample_all(
    ue_pos: Position,
    ue_is_aerial: bool,
    world: WorldGeometry,
    rng,
    cfg: RadioConfig,
    carrier_hz: float,
) -> RadioSample:
    """Measure all gNBs once, drawing one shadowing value per gNB in id order.

    The draws always happen (scaled by sigma), so a zero-sigma config consumes
    the same amount of randomness and stays stream-aligned with noisy configs.
    """
    gnbs = world.gnbs
    shadows = rng.standard_normal(len(gnbs))
    sigma = cfg.shadowing_sigma_db
    penalty = cfg.aerial_penalty_db if ue_is_aerial else cfg.ground_penalty_db
    f_term = 20.0 * math.log10(carrier_hz / 1e6)
    ux, uy, uz = ue_pos.x, ue_pos.y, ue_pos.z
    values = []
    for i, gnb in enumerate(gnbs):
        g = gnb.position
        dist = math.sqrt((ux - g.x) ** 2 + (uy - g.y) ** 2 + (uz - g.z) ** 2)
        # identical arithmetic to rsrp_dbm()/fspl_db(), with f_term hoisted
        loss = 32.44 + 20.0 * math.log10(max(dist, 1.0) / 1000.0) + f_term
        values.append(gnb.tx_power_dbm - loss - penalty + sigma * float(shadows[i]))
    return RadioSample(tuple(values))


def patrol_effective_rsrp(
    sample: RadioSample,
    serving_id: int,
    uav_pos: Position,
    uav_locked: bool,
    world: WorldGeometry,
    cfg: RadioConfig,
) -> float:
    """Serving-cell RSRP the patrol actually experiences.

    A UAV within the interference radius (horizontal distance) of the patrol's
    serving gNB degrades that link; the penalty is partially reduced once the
    UAV is locked down. Neighbor measurements are unaffected.
    """
    value = sample.rsrp_dbm[serving_id]
    g = world.gnbs[serving_id].position
    horiz = math.hypot(uav_pos.x - g.x, uav_pos.y - g.y)
    if horiz <= cfg.interference_radius_m:
        value -= cfg.interference_db_post_lock if uav_locked else cfg.interference_db_pre_lock
    return value
