"""Fast invariant suite behind the ``check`` subcommand.

Each check pits an incremental implementation against a naive reference
(full-history rescans) or a known statistical target, on fixed seeds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backhaul as bh
from . import detection as det
from . import handover as ho
from .engine import rng_new, simulate
from .radio import RadioSample
from .scenario import SCENARIOS, ScenarioId, derive_seed, make_run_config


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _naive_a3_trace(trace, cfg: ho.HandoverConfig, dt: float):
    """Reference A3 decisions by rescanning history at every step."""
    n_cells = len(trace[0])
    serving_hist: list[int] = []
    events: list[tuple[int, int, int]] = []
    serving = max(range(n_cells), key=lambda k: (trace[0][k], -k))
    last_reset = -1  # step index after which qualification streaks may start
    for i, rsrp in enumerate(trace):
        qualifying = []
        for n in range(n_cells):
            if n == serving:
                continue
            # walk back over consecutive qualifying steps (serving fixed since
            # the last reset, so the threshold at step j uses serving's value)
            streak = 0
            j = i
            while j > last_reset:
                margin = trace[j][n] - trace[j][serving]
                if margin > cfg.a3_offset_db + cfg.hysteresis_db:
                    streak += 1
                    j -= 1
                else:
                    break
            if streak >= 1 and streak * dt >= cfg.ttt_s:
                qualifying.append(n)
        if qualifying:
            target = max(qualifying, key=lambda k: (rsrp[k], -k))
            events.append((i, serving, target))
            serving = target
            last_reset = i
        serving_hist.append(serving)
    return serving_hist, events


def check_a3_oracle(n_traces: int = 100, steps: int = 400, seed: int = 1) -> CheckResult:
    rng = np.random.Generator(np.random.PCG64(seed))
    cfg = ho.HandoverConfig()
    dt = 0.5
    for k in range(n_traces):
        trace = [tuple(-80.0 + 10.0 * rng.standard_normal(3)) for _ in range(steps)]
        state = ho.init_serving(RadioSample(trace[0]))
        got = []
        got_events = []
        for i, rsrp in enumerate(trace):
            state, ev = ho.step_a3(state, RadioSample(rsrp), i * dt, dt, cfg)
            got.append(state.serving_id)
            if ev:
                got_events.append((i, ev.from_id, ev.to_id))
        want, want_events = _naive_a3_trace(trace, cfg, dt)
        if got != want or got_events != want_events:
            return CheckResult("a3-oracle", False, f"mismatch on trace {k}")
    return CheckResult("a3-oracle", True, f"{n_traces} traces matched")


def _naive_detect_time(serving_series, samples, ho_steps, cfg: det.DetectionConfig, dt: float):
    """Brute-force detector: recompute everything from history each step."""
    window_steps = int(round(cfg.window_s / dt))
    need = int(round(cfg.persistence_s / dt))
    streak = 0
    for i in range(len(serving_series)):
        t = i * dt
        window = serving_series[max(0, i - window_steps + 1) : i + 1]
        ho_times = [s * dt for s in ho_steps if s <= i and s * dt >= t - cfg.window_s]
        cond = len(ho_times) >= cfg.ho_count_threshold
        if not cond:
            mean = sum(window) / len(window)
            var = sum((v - mean) ** 2 for v in window) / len(window)
            best = max(samples[i])
            strong = sum(1 for v in samples[i] if v >= best - cfg.strong_delta_db)
            cond = var >= cfg.rsrp_var_threshold_db2 and strong >= cfg.strong_count_threshold
        streak = streak + 1 if cond else 0
        if streak >= need:
            return t
    return None


def check_detector_oracle(n_runs: int = 20, steps: int = 400, seed: int = 2) -> CheckResult:
    rng = np.random.Generator(np.random.PCG64(seed))
    cfg = det.DetectionConfig()
    dt = 0.5
    for k in range(n_runs):
        samples = [tuple(-75.0 + 6.0 * rng.standard_normal(3)) for _ in range(steps)]
        serving = list(rng.integers(0, 3, size=steps))
        ho_steps = sorted(
            int(s) for s in rng.choice(steps, size=int(rng.integers(0, 25)), replace=False)
        )
        ho_set = set(ho_steps)
        state = det.new_state(cfg, dt)
        fired = None
        for i in range(steps):
            ev = ho.HoEvent(i * dt, 0, 1) if i in ho_set else None
            state, hit = det.step_detect(
                state, RadioSample(samples[i]), int(serving[i]), ev, i * dt, dt, cfg
            )
            if hit is not None:
                fired = hit
                break
        series = [samples[i][serving[i]] for i in range(steps)]
        want = _naive_detect_time(series, samples, ho_steps, cfg, dt)
        if fired != want:
            return CheckResult("detector-oracle", False, f"run {k}: got {fired}, want {want}")
    return CheckResult("detector-oracle", True, f"{n_runs} runs matched")


def check_poisson_rate(n_seeds: int = 1000, rate: float = 0.02, horizon: float = 200.0) -> CheckResult:
    counts = []
    for k in range(n_seeds):
        rng = rng_new(derive_seed("poisson-check", 0, 0, k))
        counts.append(len(bh.outage_arrival_times(rng, rate, horizon)))
    mean = sum(counts) / len(counts)
    ok = 3.8 <= mean <= 4.2
    return CheckResult("poisson-rate", ok, f"mean arrivals {mean:.3f} (target 4.0 +/- 0.2)")


def check_fallback_cap(n_runs: int = 200) -> CheckResult:
    """Every detected stress-fallback run must apply within the deadline."""
    spec = SCENARIOS[ScenarioId.STRESS_FALLBACK]
    rng = np.random.Generator(np.random.PCG64(derive_seed("fallback-check", 0, 0, 0)))
    checked = 0
    for k in range(n_runs):
        speed = float(rng.choice((6, 9, 12, 15, 18)))
        altitude = float(rng.choice((60, 90, 120, 150, 180)))
        cfg = make_run_config(spec, speed, altitude, int(k))
        record = simulate(cfg)
        if not record.detected:
            continue
        checked += 1
        if record.detect_mitigate_delay_s > spec.fallback_deadline_s:
            return CheckResult(
                "fallback-cap",
                False,
                f"run {k}: delay {record.detect_mitigate_delay_s:.3f} s exceeds deadline",
            )
    return CheckResult("fallback-cap", True, f"{checked} detected runs within 2 s")


def run_all_checks() -> list[CheckResult]:
    return [
        check_a3_oracle(),
        check_detector_oracle(),
        check_poisson_rate(),
        check_fallback_cap(),
    ]
