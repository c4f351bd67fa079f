"""Event-A3 handover state machine with per-neighbor time-to-trigger.

A neighbor must beat the serving cell by offset + hysteresis on consecutive
steps until its accumulator reaches the TTT, at which point the handover
executes instantly. A lockdown latch pins the serving cell for good.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .radio import RadioSample


@dataclass(frozen=True)
class HandoverConfig:
    hysteresis_db: float = 3.0
    a3_offset_db: float = 0.0
    ttt_s: float = 1.5

    def __post_init__(self):
        if self.hysteresis_db < 0:
            raise ValueError("hysteresis_db must be >= 0")
        if self.ttt_s < 0:
            raise ValueError("ttt_s must be >= 0")


@dataclass(frozen=True, slots=True)
class HoEvent:
    time_s: float
    from_id: int
    to_id: int

    def __post_init__(self):
        if self.from_id == self.to_id:
            raise ValueError("handover must change the serving cell")


@dataclass(slots=True)
class HandoverState:
    serving_id: int
    ttt_accum_s: list[float]
    locked: bool = False
    ho_log: list[HoEvent] = field(default_factory=list)


def init_serving(sample: RadioSample) -> HandoverState:
    """Attach to the strongest cell (lowest id on an exact tie)."""
    values = sample.rsrp_dbm
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return HandoverState(serving_id=best, ttt_accum_s=[0.0] * len(values))


def step_a3(
    state: HandoverState,
    sample: RadioSample,
    t: float,
    dt: float,
    cfg: HandoverConfig,
) -> tuple[HandoverState, HoEvent | None]:
    """Advance the A3 machine by one step; returns the state and any handover.

    The returned state is the same object, mutated in place. A locked state
    never changes and never emits events.
    """
    if state.locked:
        return state, None
    values = sample.rsrp_dbm
    serving = state.serving_id
    threshold = values[serving] + cfg.a3_offset_db + cfg.hysteresis_db
    accum = state.ttt_accum_s
    fired = -1
    for n in range(len(values)):
        if n == serving:
            accum[n] = 0.0
            continue
        if values[n] > threshold:
            accum[n] += dt
            if accum[n] >= cfg.ttt_s and (fired < 0 or values[n] > values[fired]):
                fired = n
        else:
            accum[n] = 0.0
    if fired < 0:
        return state, None
    event = HoEvent(time_s=t, from_id=serving, to_id=fired)
    state.serving_id = fired
    for n in range(len(accum)):
        accum[n] = 0.0
    state.ho_log.append(event)
    return state, event


def lock(state: HandoverState) -> HandoverState:
    """Pin the current serving cell; idempotent."""
    state.locked = True
    return state
