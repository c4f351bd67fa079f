"""RAN-side sliding-window anomaly detector for the intruder UAV.

Flags a UE when, persistently for a short interval, it either hands over too
often within the window or shows high serving-RSRP variance while several
cells are near-equal in strength. Whitelisted UEs are never flagged.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .handover import HoEvent
from .radio import RadioSample


@dataclass(frozen=True)
class DetectionConfig:
    window_s: float = 20.0
    ho_count_threshold: int = 3
    rsrp_var_threshold_db2: float = 18.0
    strong_delta_db: float = 6.0
    strong_count_threshold: int = 3
    persistence_s: float = 3.0

    def __post_init__(self):
        if self.window_s <= 0 or self.persistence_s <= 0:
            raise ValueError("window_s and persistence_s must be > 0")
        if self.ho_count_threshold <= 0 or self.strong_count_threshold <= 0:
            raise ValueError("count thresholds must be > 0")
        if self.rsrp_var_threshold_db2 <= 0 or self.strong_delta_db <= 0:
            raise ValueError("rsrp_var_threshold_db2 and strong_delta_db must be > 0")


@dataclass(slots=True)
class DetectionState:
    rsrp_window: deque = field(default_factory=deque)
    ho_times_window: deque = field(default_factory=deque)
    persistence_accum_s: float = 0.0
    detected_at_s: float | None = None
    whitelisted: bool = False


def new_state(cfg: DetectionConfig, dt: float, whitelisted: bool = False) -> DetectionState:
    capacity = int(round(cfg.window_s / dt))
    return DetectionState(rsrp_window=deque(maxlen=capacity), whitelisted=whitelisted)


def strong_cell_count(sample: RadioSample, delta_db: float) -> int:
    """Cells (the best one included) within delta_db of the strongest cell."""
    best = max(sample.rsrp_dbm)
    return sum(1 for v in sample.rsrp_dbm if v >= best - delta_db)


def window_variance(rsrp_window) -> float:
    """Population variance of the buffered serving-cell RSRP values."""
    n = len(rsrp_window)
    if n == 0:
        raise ValueError("window must be nonempty")
    mean = sum(rsrp_window) / n
    return sum((v - mean) ** 2 for v in rsrp_window) / n


def step_detect(
    state: DetectionState,
    sample: RadioSample,
    serving_id: int,
    new_ho: HoEvent | None,
    t: float,
    dt: float,
    cfg: DetectionConfig,
) -> tuple[DetectionState, float | None]:
    """Feed one step of observations; returns the state and the firing time.

    Must be called once per step in time order and never after a detection
    has fired. The returned state is the same object, mutated in place.
    """
    if state.detected_at_s is not None:
        raise RuntimeError("step_detect called after detection already fired")
    state.rsrp_window.append(sample.rsrp_dbm[serving_id])
    if new_ho is not None:
        state.ho_times_window.append(new_ho.time_s)
    horizon = t - cfg.window_s
    while state.ho_times_window and state.ho_times_window[0] < horizon:
        state.ho_times_window.popleft()

    condition = False
    if not state.whitelisted:
        if len(state.ho_times_window) >= cfg.ho_count_threshold:
            condition = True
        elif (
            strong_cell_count(sample, cfg.strong_delta_db) >= cfg.strong_count_threshold
            and window_variance(state.rsrp_window) >= cfg.rsrp_var_threshold_db2
        ):
            condition = True

    if condition:
        state.persistence_accum_s += dt
    else:
        state.persistence_accum_s = 0.0
    if state.persistence_accum_s >= cfg.persistence_s:
        state.detected_at_s = t
        return state, t
    return state, None
