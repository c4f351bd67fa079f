"""Control-plane path model for the lockdown command.

Terrestrial backhaul delivers commands immediately. LEO satellite backhaul
adds Gaussian latency with jitter and Poisson-arrival outages of fixed
duration; an optional local fallback deadline caps the time to apply.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Backhaul(str, Enum):
    TERRESTRIAL = "terrestrial"
    LEO_SATELLITE = "leo_satellite"


class CommandPath(str, Enum):
    IMMEDIATE = "immediate"
    REMOTE = "remote"
    FALLBACK = "fallback"


MIN_LATENCY_S = 0.001


@dataclass(frozen=True)
class BackhaulConfig:
    kind: Backhaul = Backhaul.TERRESTRIAL
    latency_mean_s: float = 0.030
    latency_jitter_s: float = 0.010
    outage_rate_hz: float = 0.0
    outage_duration_s: float = 5.0
    fallback_enabled: bool = False
    fallback_deadline_s: float = 2.0

    def __post_init__(self):
        if self.latency_mean_s < 0 or self.latency_jitter_s < 0:
            raise ValueError("latency_mean_s and latency_jitter_s must be >= 0")
        if self.outage_rate_hz < 0:
            raise ValueError("outage_rate_hz must be >= 0")
        if self.outage_duration_s <= 0:
            raise ValueError("outage_duration_s must be > 0")
        if self.fallback_deadline_s <= 0:
            raise ValueError("fallback_deadline_s must be > 0")


@dataclass(frozen=True)
class OutageSchedule:
    """Merged, disjoint, time-sorted outage intervals."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev_end = -1.0
        for start, end in self.intervals:
            if start >= end:
                raise ValueError("outage interval must have start < end")
            if start <= prev_end:
                raise ValueError("outage intervals must be disjoint and sorted")
            prev_end = end


@dataclass(frozen=True)
class CommandOutcome:
    t_issue_s: float
    t_apply_s: float
    path: CommandPath

    def __post_init__(self):
        if self.t_apply_s < self.t_issue_s:
            raise ValueError("command cannot apply before it is issued")


def outage_arrival_times(rng, rate_hz: float, horizon_s: float) -> list[float]:
    """Raw Poisson arrival times over [0, horizon] via exponential gaps."""
    if rate_hz <= 0:
        return []
    times = []
    t = rng.exponential(1.0 / rate_hz)
    while t <= horizon_s:
        times.append(t)
        t += rng.exponential(1.0 / rate_hz)
    return times


def merge_intervals(intervals: list[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    """Union of intervals: overlapping or touching intervals collapse."""
    merged: list[tuple[float, float]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return tuple(merged)


def gen_outages(rng, rate_hz: float, duration_s: float, horizon_s: float) -> OutageSchedule:
    """Draw the run's outage schedule.

    Each Poisson arrival opens an interval of exactly ``duration_s``;
    overlapping intervals are merged into their union. A zero rate yields an
    empty schedule without consuming any draws.
    """
    if horizon_s <= 0:
        raise ValueError("horizon_s must be > 0")
    arrivals = outage_arrival_times(rng, rate_hz, horizon_s)
    return OutageSchedule(merge_intervals([(a, a + duration_s) for a in arrivals]))


def in_outage(schedule: OutageSchedule, t: float) -> bool:
    """True iff t is strictly inside an interval; interval ends are usable."""
    for start, end in schedule.intervals:
        if start < t < end:
            return True
        if t <= start:
            break
    return False


def sample_latency(rng, cfg: BackhaulConfig) -> float:
    """One satellite one-way latency draw, clamped at 1 ms."""
    draw = cfg.latency_mean_s + cfg.latency_jitter_s * float(rng.standard_normal())
    return max(draw, MIN_LATENCY_S)


def command_apply_time(
    t_issue: float, cfg: BackhaulConfig, schedule: OutageSchedule, latency: float
) -> CommandOutcome:
    """When does a lockdown command issued at ``t_issue`` take effect?

    Terrestrial applies instantly. Over LEO the command nominally arrives
    after ``latency``; if that instant falls inside an outage it is deferred
    to the outage end. With fallback enabled, the gNB applies the command
    locally at ``t_issue + fallback_deadline_s`` if the remote path would be
    any later.
    """
    if t_issue < 0:
        raise ValueError("t_issue must be >= 0")
    if cfg.kind is Backhaul.TERRESTRIAL:
        return CommandOutcome(t_issue, t_issue, CommandPath.IMMEDIATE)
    nominal = t_issue + latency
    remote = nominal
    for start, end in schedule.intervals:
        if start < nominal <= end:
            remote = end
            break
        if nominal <= start:
            break
    deadline = t_issue + cfg.fallback_deadline_s
    # keep the cap exact in floating point: (t_issue + tau) - t_issue may
    # round one ulp above tau, so nudge down until the difference obeys it
    while deadline - t_issue > cfg.fallback_deadline_s:
        deadline = math.nextafter(deadline, t_issue)
    if cfg.fallback_enabled and remote > deadline:
        return CommandOutcome(t_issue, deadline, CommandPath.FALLBACK)
    return CommandOutcome(t_issue, remote, CommandPath.REMOTE)
