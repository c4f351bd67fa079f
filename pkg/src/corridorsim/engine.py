"""One complete simulation run: mobility -> radio -> handover -> detection ->
mitigation, with KPI accumulation.

``simulate`` is a pure function of its RunConfig. Randomness comes from a
single per-run PCG64 stream consumed in a fixed order: first the outage
schedule, then per step the patrol shadowing (gNB order 0..n), the UAV
shadowing (same order), and finally one latency draw at the detection step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backhaul as bh
from . import detection as det
from . import handover as ho
from . import mobility as mob
from . import radio
from .backhaul import Backhaul, CommandPath
from .scenario import RunConfig

PRNG_ALGORITHM = "numpy-pcg64"


class RunRng:
    """Deterministic per-run random stream backed by numpy's PCG64."""

    __slots__ = ("_gen",)
    algorithm = PRNG_ALGORITHM

    def __init__(self, seed: int):
        self._gen = np.random.Generator(np.random.PCG64(int(seed)))

    def standard_normal(self, n: int | None = None):
        return self._gen.standard_normal() if n is None else self._gen.standard_normal(n)

    def exponential(self, scale: float) -> float:
        return float(self._gen.exponential(scale))

    def random(self, n: int | None = None):
        return self._gen.random() if n is None else self._gen.random(n)


def rng_new(seed: int) -> RunRng:
    """A fresh run stream; the same seed always yields the same draws."""
    return RunRng(seed)


@dataclass(frozen=True)
class KpiRecord:
    """One row of the results table; all per-run KPIs plus detection metadata."""

    scenario_id: str
    uav_speed_mps: float
    uav_altitude_m: float
    rep: int
    seed: int
    detected: bool
    t_detect_s: float | None
    t_apply_s: float | None
    detect_mitigate_delay_s: float | None
    mitigation_path: CommandPath | None
    extra_handovers: int
    patrol_ho_rate_per_min: float
    dwell_before_lock_s: float
    nfz_violation_steps: int
    uav_total_hos: int
    patrol_total_hos: int

    def __post_init__(self):
        if self.detected:
            if self.detect_mitigate_delay_s is None or self.detect_mitigate_delay_s < 0:
                raise ValueError("detected run must carry a non-negative delay")
        else:
            if self.t_detect_s is not None or self.t_apply_s is not None:
                raise ValueError("undetected run cannot carry detection times")
            if self.extra_handovers != 0 or self.dwell_before_lock_s != 0.0:
                raise ValueError("undetected run must have zero extra handovers and dwell")


def simulate(config: RunConfig) -> KpiRecord:
    """Run the full discrete-time loop and return the KPI record."""
    dt = config.dt_s
    steps = config.n_steps
    world = config.world
    rcfg = config.radio
    hcfg = config.handover
    dcfg = config.detection
    bcfg = config.backhaul
    mcfg = config.mobility
    speed = config.uav_speed_mps
    altitude = config.uav_altitude_m
    carrier = config.carrier_hz
    is_leo = bcfg.kind is Backhaul.LEO_SATELLITE

    rng = rng_new(config.seed)
    schedule = bh.gen_outages(rng, bcfg.outage_rate_hz, bcfg.outage_duration_s, config.sim_time_s)

    patrol_state: ho.HandoverState | None = None
    uav_state: ho.HandoverState | None = None
    det_state = det.new_state(dcfg, dt, whitelisted=False)

    t_detect: float | None = None
    outcome: bh.CommandOutcome | None = None
    dwell = 0.0
    nfz_steps = 0

    for i in range(steps):
        t = i * dt
        patrol_pos = mob.patrol_position(t, world, mcfg)
        uav_pos = mob.uav_position(t, speed, altitude, world, mcfg)

        patrol_sample = radio.sample_all(patrol_pos, False, world, rng, rcfg, carrier)
        uav_sample = radio.sample_all(uav_pos, True, world, rng, rcfg, carrier)

        if patrol_state is None:
            patrol_state = ho.init_serving(patrol_sample)
            uav_state = ho.init_serving(uav_sample)

        # Patrol A3 compares raw neighbors against its interference-adjusted
        # serving measurement; the UAV sees its own raw sample.
        eff_serving = radio.patrol_effective_rsrp(
            patrol_sample, patrol_state.serving_id, uav_pos, uav_state.locked, world, rcfg
        )
        if eff_serving != patrol_sample.rsrp_dbm[patrol_state.serving_id]:
            adjusted = list(patrol_sample.rsrp_dbm)
            adjusted[patrol_state.serving_id] = eff_serving
            patrol_view = radio.RadioSample(tuple(adjusted))
        else:
            patrol_view = patrol_sample
        patrol_state, _ = ho.step_a3(patrol_state, patrol_view, t, dt, hcfg)
        uav_state, uav_event = ho.step_a3(uav_state, uav_sample, t, dt, hcfg)

        if t_detect is None:
            det_state, fired = det.step_detect(
                det_state, uav_sample, uav_state.serving_id, uav_event, t, dt, dcfg
            )
            if fired is not None:
                t_detect = fired
                latency = bh.sample_latency(rng, bcfg) if is_leo else 0.0
                outcome = bh.command_apply_time(t_detect, bcfg, schedule, latency)

        if outcome is not None and not uav_state.locked and t >= outcome.t_apply_s:
            uav_state = ho.lock(uav_state)

        uav_pose = mob.pose(uav_pos, world)
        if uav_pose.in_nfz:
            nfz_steps += 1
        if (
            outcome is not None
            and t_detect < t < outcome.t_apply_s
            and uav_pose.in_corridor
        ):
            dwell += dt

    patrol_hos = len(patrol_state.ho_log)
    uav_hos = len(uav_state.ho_log)
    if outcome is not None:
        extra = sum(1 for e in uav_state.ho_log if t_detect < e.time_s < outcome.t_apply_s)
    else:
        extra = 0
    detected = t_detect is not None

    return KpiRecord(
        scenario_id=config.label,
        uav_speed_mps=speed,
        uav_altitude_m=altitude,
        rep=config.rep,
        seed=config.seed,
        detected=detected,
        t_detect_s=t_detect,
        t_apply_s=outcome.t_apply_s if detected else None,
        detect_mitigate_delay_s=(outcome.t_apply_s - t_detect) if detected else None,
        mitigation_path=outcome.path if detected else None,
        extra_handovers=extra,
        patrol_ho_rate_per_min=patrol_hos * 60.0 / config.sim_time_s,
        dwell_before_lock_s=dwell,
        nfz_violation_steps=nfz_steps,
        uav_total_hos=uav_hos,
        patrol_total_hos=patrol_hos,
    )
