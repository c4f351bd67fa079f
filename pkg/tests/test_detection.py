"""Sliding-window detector: window arithmetic, persistence, whitelisting,
and equivalence with a brute-force recomputation over the full history."""
import numpy as np
import pytest

from corridorsim.detection import (
    DetectionConfig,
    new_state,
    step_detect,
    strong_cell_count,
    window_variance,
)
from corridorsim.handover import HoEvent
from corridorsim.radio import RadioSample

DT = 0.5
CFG = DetectionConfig()

FLAT = RadioSample((-60.0, -80.0, -85.0))  # low variance, one strong cell


def _feed(state, samples, serving, hos, cfg=CFG):
    """Drive the detector; returns the firing time or None."""
    for i, sample in enumerate(samples):
        ev = HoEvent(i * DT, 0, 1) if i in hos else None
        state, fired = step_detect(state, sample, serving[i], ev, i * DT, DT, cfg)
        if fired is not None:
            return fired
    return None


def test_strong_cell_count_examples():
    assert strong_cell_count(RadioSample((-60.0, -63.0, -65.0)), 6.0) == 3
    assert strong_cell_count(RadioSample((-60.0, -70.0, -80.0)), 6.0) == 1
    assert strong_cell_count(RadioSample((-55.0, -55.0, -55.0)), 6.0) == 3


def test_window_variance_examples():
    assert window_variance([-60.0] * 10) == 0.0
    assert window_variance([-60.0, -66.0]) == 9.0
    assert window_variance([-72.5]) == 0.0
    with pytest.raises(ValueError):
        window_variance([])


def test_whitelisted_never_fires():
    state = new_state(CFG, DT, whitelisted=True)
    # three handovers every few steps plus wild variance: still exempt
    rng = np.random.Generator(np.random.PCG64(3))
    samples = [RadioSample(tuple(-60 + 12 * rng.standard_normal(3))) for _ in range(400)]
    assert _feed(state, samples, [0] * 400, set(range(0, 400, 4))) is None


def test_three_hos_in_window_fire_after_persistence():
    """HOs at steps 10, 12, 14 -> condition true from step 14, fires on the
    6th consecutive step (persistence 3 s at 0.5 s steps)."""
    state = new_state(CFG, DT)
    fired = _feed(state, [FLAT] * 60, [0] * 60, {10, 12, 14})
    assert fired == (14 + 5) * DT


def test_constant_rsrp_no_hos_never_fires():
    state = new_state(CFG, DT)
    assert _feed(state, [FLAT] * 400, [0] * 400, set()) is None


def test_ho_eviction_outside_window_prevents_fire():
    # two early HOs have left the 20 s window by the time the third arrives
    state = new_state(CFG, DT)
    assert _feed(state, [FLAT] * 400, [0] * 400, {0, 2, 60}) is None


def test_persistence_broken_by_condition_gap():
    """Third HO expires from the window before persistence completes."""
    cfg = DetectionConfig()
    state = new_state(cfg, DT)
    # HOs at steps 0, 20, 40: count reaches 3 at step 40 (t=20, window keeps
    # t>=0), but the first HO leaves the window at t=20.5 -> persistence resets
    fired = _feed(state, [FLAT] * 400, [0] * 400, {0, 20, 40})
    assert fired is None


def test_variance_branch_requires_strong_gate():
    rng = np.random.Generator(np.random.PCG64(9))
    # high variance but only one strong cell: gate blocks the variance branch
    samples = [
        RadioSample((-60.0 + 10.0 * float(rng.standard_normal()), -90.0, -95.0))
        for _ in range(400)
    ]
    state = new_state(CFG, DT)
    assert _feed(state, samples, [0] * 400, set()) is None


def test_variance_branch_fires_with_strong_cells():
    # serving RSRP alternates between -56 and -70 (population variance 49)
    # while all three cells stay within 6 dB of each other at every step
    hi = RadioSample((-56.0, -58.0, -60.0))
    lo = RadioSample((-70.0, -72.0, -74.0))
    samples = [hi if i % 2 == 0 else lo for i in range(40)]
    state = new_state(CFG, DT)
    fired = _feed(state, samples, [0] * 40, set())
    # condition holds from the second sample on; persistence completes after
    # six consecutive true steps
    assert fired == 6 * DT


def test_detection_fires_at_most_once_and_rejects_further_calls():
    state = new_state(CFG, DT)
    fired = _feed(state, [FLAT] * 60, [0] * 60, {10, 12, 14})
    assert fired is not None
    assert state.detected_at_s == fired
    with pytest.raises(RuntimeError):
        step_detect(state, FLAT, 0, None, 100.0, DT, CFG)


def test_matches_brute_force_oracle_on_random_runs():
    """100 random synthetic runs: firing times agree exactly."""
    from oracles import brute_force_detect_time

    rng = np.random.Generator(np.random.PCG64(77))
    for _ in range(100):
        n = 400
        spread = float(rng.uniform(2.0, 9.0))
        samples = [
            RadioSample(tuple(-70.0 + spread * rng.standard_normal(3))) for _ in range(n)
        ]
        serving = [int(s) for s in rng.integers(0, 3, size=n)]
        n_hos = int(rng.integers(0, 30))
        hos = set(int(x) for x in rng.choice(n, size=n_hos, replace=False))
        state = new_state(CFG, DT)
        got = _feed(state, samples, serving, hos)
        want = brute_force_detect_time(
            [s.rsrp_dbm for s in samples], serving, hos, CFG, DT
        )
        assert got == want


def test_lower_ho_threshold_never_delays_firing():
    rng = np.random.Generator(np.random.PCG64(123))
    loose = DetectionConfig(ho_count_threshold=2)
    for _ in range(40):
        n = 400
        samples = [RadioSample(tuple(-70.0 + 5.0 * rng.standard_normal(3))) for _ in range(n)]
        serving = [0] * n
        hos = set(int(x) for x in rng.choice(n, size=int(rng.integers(0, 20)), replace=False))
        t_strict = _feed(new_state(CFG, DT), samples, serving, hos, CFG)
        t_loose = _feed(new_state(loose, DT), samples, serving, hos, loose)
        if t_strict is not None:
            assert t_loose is not None and t_loose <= t_strict
