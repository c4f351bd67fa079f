"""Monte Carlo orchestration over the (scenario x speed x altitude x rep)
grid, sensitivity sweeps, and statistical aggregation.

Aggregates are pure functions of the record list: per-cell medians for
heatmaps, pooled empirical CDFs, and bootstrap confidence bands on a fixed
101-point abscissa grid. All file formats written here are the interface the
plotting frontend consumes.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from statistics import median
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .engine import PRNG_ALGORITHM, KpiRecord, simulate
from .scenario import (
    SCENARIOS,
    RunConfig,
    ScenarioId,
    ScenarioSpec,
    derive_seed,
    make_run_config,
    run_config_to_dict,
)

DEFAULT_SPEEDS_MPS = (6.0, 9.0, 12.0, 15.0, 18.0)
DEFAULT_ALTITUDES_M = (60.0, 90.0, 120.0, 150.0, 180.0)
DEFAULT_REPS = 20
DEFAULT_SWEEP_SCENARIOS = (
    ScenarioId.TERRESTRIAL,
    ScenarioId.LEO_OUTAGE,
    ScenarioId.LEO_OUTAGE_FALLBACK,
)


@dataclass(frozen=True)
class GridSpec:
    speeds_mps: tuple[float, ...] = DEFAULT_SPEEDS_MPS
    altitudes_m: tuple[float, ...] = DEFAULT_ALTITUDES_M
    reps: int = DEFAULT_REPS
    scenarios: tuple[ScenarioSpec, ...] = field(
        default_factory=lambda: tuple(SCENARIOS[s] for s in DEFAULT_SWEEP_SCENARIOS)
    )

    def __post_init__(self):
        if not self.speeds_mps or not self.altitudes_m or not self.scenarios:
            raise ValueError("grid axes and scenario list must be nonempty")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")


# KPI selectors: name -> (record accessor, include undetected runs?)
KPI_FIELDS: dict[str, tuple[Callable[[KpiRecord], float | None], bool]] = {
    "delay_s": (lambda r: r.detect_mitigate_delay_s, False),
    "extra_handovers": (lambda r: float(r.extra_handovers), False),
    "dwell_before_lock_s": (lambda r: r.dwell_before_lock_s, False),
    "patrol_ho_rate_per_min": (lambda r: r.patrol_ho_rate_per_min, True),
    "nfz_violation_steps": (lambda r: float(r.nfz_violation_steps), True),
}

SWEEP_OUTPUT_KPIS = ("delay_s", "extra_handovers", "patrol_ho_rate_per_min")


def build_configs(
    grid: GridSpec,
    overrides: Mapping[str, Any] | None = None,
    labels: Mapping[ScenarioId, str] | None = None,
) -> list[RunConfig]:
    configs = []
    for spec in grid.scenarios:
        label = labels.get(spec.id) if labels else None
        for speed in grid.speeds_mps:
            for altitude in grid.altitudes_m:
                for rep in range(grid.reps):
                    configs.append(
                        make_run_config(spec, speed, altitude, rep, overrides=overrides, label=label)
                    )
    return configs


def _record_key(r: KpiRecord) -> tuple:
    return (r.scenario_id, r.uav_speed_mps, r.uav_altitude_m, r.rep)


def run_grid(
    grid: GridSpec,
    parallelism: int = 1,
    overrides: Mapping[str, Any] | None = None,
    labels: Mapping[ScenarioId, str] | None = None,
) -> list[KpiRecord]:
    """One KpiRecord per grid point, sorted canonically regardless of the
    execution order or degree of parallelism."""
    configs = build_configs(grid, overrides, labels)
    if parallelism <= 1 or len(configs) < 2:
        records = [simulate(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            chunk = max(1, len(configs) // (parallelism * 8))
            records = list(pool.map(simulate, configs, chunksize=chunk))
    records.sort(key=_record_key)
    return records


@dataclass(frozen=True)
class HeatmapTable:
    kpi: str
    scenario: str
    speeds_mps: tuple[float, ...]
    altitudes_m: tuple[float, ...]
    # cells[i][j] = median KPI at (speeds[i], altitudes[j]); None when no
    # detected run contributes.
    cells: tuple[tuple[float | None, ...], ...]


def aggregate_heatmap(records: Sequence[KpiRecord], kpi: str, scenario: str) -> HeatmapTable:
    """Per-cell medians of one KPI for one scenario.

    Delay-family KPIs exclude undetected runs; patrol and NFZ KPIs include
    every run. An even-sized cell takes the midpoint of the two central
    values; a cell with no contributing runs is marked absent.
    """
    getter, include_undetected = KPI_FIELDS[kpi]
    rows = [r for r in records if r.scenario_id == scenario]
    if not rows:
        raise ValueError(f"no records for scenario {scenario!r}")
    speeds = tuple(sorted({r.uav_speed_mps for r in rows}))
    altitudes = tuple(sorted({r.uav_altitude_m for r in rows}))
    cells = []
    for speed in speeds:
        row = []
        for altitude in altitudes:
            values = [
                getter(r)
                for r in rows
                if r.uav_speed_mps == speed
                and r.uav_altitude_m == altitude
                and (include_undetected or r.detected)
            ]
            values = [v for v in values if v is not None]
            row.append(median(values) if values else None)
        cells.append(tuple(row))
    return HeatmapTable(kpi, scenario, speeds, altitudes, tuple(cells))


@dataclass(frozen=True)
class CdfCurve:
    """Right-continuous empirical CDF with an optional bootstrap band."""

    xs: tuple[float, ...]
    fs: tuple[float, ...]
    band_x: tuple[float, ...] | None = None
    band_lo: tuple[float, ...] | None = None
    band_hi: tuple[float, ...] | None = None

    def __post_init__(self):
        if any(b > a for a, b in zip(self.xs[1:], self.xs)):
            raise ValueError("xs must be non-decreasing")
        if any(b > a for a, b in zip(self.fs[1:], self.fs)):
            raise ValueError("fs must be non-decreasing")
        if self.band_lo is not None and self.band_hi is not None:
            if any(lo > hi for lo, hi in zip(self.band_lo, self.band_hi)):
                raise ValueError("band_lo must not exceed band_hi")


def pooled_cdf(samples: Sequence[float]) -> CdfCurve:
    """Empirical CDF over unique sorted values; F(x) = P(X <= x)."""
    if not samples:
        raise ValueError("samples must be nonempty")
    values = np.sort(np.asarray(samples, dtype=float))
    n = values.size
    xs = np.unique(values)
    counts = np.searchsorted(values, xs, side="right")
    return CdfCurve(tuple(float(x) for x in xs), tuple(float(c) / n for c in counts))


def bootstrap_band(
    samples: Sequence[float],
    resamples: int = 1000,
    alpha: float = 0.05,
    rng=None,
) -> tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]]:
    """Percentile bootstrap band for the empirical CDF.

    Evaluated on 101 evenly spaced abscissae spanning [min, max] of the data;
    returns (grid, lower, upper). The default stream is seeded via
    derive_seed("bootstrap", 0, 0, 0) so sweep outputs are reproducible.
    """
    if not samples:
        raise ValueError("samples must be nonempty")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(derive_seed("bootstrap", 0, 0, 0)))
    values = np.asarray(samples, dtype=float)
    n = values.size
    grid = np.linspace(values.min(), values.max(), 101)
    draws = rng.integers(0, n, size=(resamples, n))
    resampled = np.sort(values[draws], axis=1)
    # F_b(x) for every resample b and abscissa x, via searchsorted per row
    cdf_matrix = np.empty((resamples, grid.size))
    for b in range(resamples):
        cdf_matrix[b] = np.searchsorted(resampled[b], grid, side="right") / n
    lo = np.percentile(cdf_matrix, 100.0 * (alpha / 2.0), axis=0)
    hi = np.percentile(cdf_matrix, 100.0 * (1.0 - alpha / 2.0), axis=0)
    return tuple(map(float, grid)), tuple(map(float, lo)), tuple(map(float, hi))


def cdf_with_band(samples: Sequence[float], resamples: int = 1000, alpha: float = 0.05) -> CdfCurve:
    base = pooled_cdf(samples)
    grid, lo, hi = bootstrap_band(samples, resamples, alpha)
    return CdfCurve(base.xs, base.fs, grid, lo, hi)


class SensitivityAxis(str, Enum):
    HYSTERESIS = "hysteresis"
    HO_THRESHOLD = "ho-threshold"
    OUTAGE_RATE = "outage-rate"


_AXIS_INFO: dict[SensitivityAxis, tuple[str, str, str]] = {
    # axis -> (config section, field, seed-tag prefix)
    SensitivityAxis.HYSTERESIS: ("handover", "hysteresis_db", "H"),
    SensitivityAxis.HO_THRESHOLD: ("detection", "ho_count_threshold", "hoThr"),
    SensitivityAxis.OUTAGE_RATE: ("backhaul", "outage_rate_hz", "lam"),
}

DEFAULT_SENSITIVITY_VALUES: dict[SensitivityAxis, tuple[float, ...]] = {
    SensitivityAxis.HYSTERESIS: (1.0, 2.0, 3.0, 4.0, 6.0),
    SensitivityAxis.HO_THRESHOLD: (2, 3, 4),
    SensitivityAxis.OUTAGE_RATE: (0.01, 0.02, 0.05),
}


@dataclass(frozen=True)
class SensitivitySpec:
    axis: SensitivityAxis
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.values:
            object.__setattr__(self, "values", DEFAULT_SENSITIVITY_VALUES[self.axis])


def _canon_value(x: float) -> str:
    xf = float(x)
    return str(int(xf)) if xf.is_integer() else repr(xf)


def sensitivity_label(scenario: ScenarioSpec, axis: SensitivityAxis, value: float) -> str:
    _, _, tag = _AXIS_INFO[axis]
    return f"{scenario.id.value}+{tag}={_canon_value(value)}"


def run_sensitivity(
    spec: SensitivitySpec,
    grid: GridSpec,
    parallelism: int = 1,
    overrides: Mapping[str, Any] | None = None,
) -> dict[float, list[KpiRecord]]:
    """Run the grid once per axis value; the axis value enters the scenario
    label (and therefore every seed), keeping the sweeps independent."""
    section, fname, _ = _AXIS_INFO[spec.axis]
    out: dict[float, list[KpiRecord]] = {}
    for value in spec.values:
        merged: dict[str, Any] = {k: v for k, v in (overrides or {}).items()}
        sub = dict(merged.get(section, {}))
        typed = int(value) if spec.axis is SensitivityAxis.HO_THRESHOLD else float(value)
        sub[fname] = typed
        merged[section] = sub
        labels = {
            s.id: sensitivity_label(s, spec.axis, value) for s in grid.scenarios
        }
        out[value] = run_grid(grid, parallelism, overrides=merged, labels=labels)
    return out


# ---------------------------------------------------------------------------
# File outputs

RUNS_CSV_HEADER = (
    "scenario,speed_mps,altitude_m,rep,seed,detected,t_detect_s,t_apply_s,delay_s,"
    "path,extra_handovers,patrol_ho_rate_per_min,dwell_before_lock_s,"
    "nfz_violation_steps,uav_total_hos,patrol_total_hos"
)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def record_to_row(r: KpiRecord) -> list[str]:
    return [
        r.scenario_id,
        f"{r.uav_speed_mps:.6f}",
        f"{r.uav_altitude_m:.6f}",
        str(r.rep),
        str(r.seed),
        "true" if r.detected else "false",
        _fmt(r.t_detect_s),
        _fmt(r.t_apply_s),
        _fmt(r.detect_mitigate_delay_s),
        r.mitigation_path.value if r.mitigation_path is not None else "",
        str(r.extra_handovers),
        f"{r.patrol_ho_rate_per_min:.6f}",
        f"{r.dwell_before_lock_s:.6f}",
        str(r.nfz_violation_steps),
        str(r.uav_total_hos),
        str(r.patrol_total_hos),
    ]


def write_runs_csv(records: Iterable[KpiRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_CSV_HEADER.split(","))
        for r in records:
            writer.writerow(record_to_row(r))


def write_heatmap_csv(table: HeatmapTable, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + [_canon_value(a) for a in table.altitudes_m])
        for speed, row in zip(table.speeds_mps, table.cells):
            writer.writerow([_canon_value(speed)] + [_fmt(v) for v in row])


def write_cdf_csv(curve: CdfCurve, path: str) -> None:
    """Band-grid representation: x, point-estimate F(x), band bounds."""
    if curve.band_x is None:
        raise ValueError("curve must carry a bootstrap band")
    xs = np.asarray(curve.xs)
    fs = np.asarray(curve.fs)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "F", "band_lo", "band_hi"])
        idx = np.searchsorted(xs, np.asarray(curve.band_x), side="right") - 1
        for k, x in enumerate(curve.band_x):
            f_at = float(fs[idx[k]]) if idx[k] >= 0 else 0.0
            writer.writerow([f"{x:.6f}", f"{f_at:.6f}", f"{curve.band_lo[k]:.6f}", f"{curve.band_hi[k]:.6f}"])


def write_meta(
    path: str,
    grid: GridSpec,
    overrides: Mapping[str, Any] | None,
    example_config: RunConfig,
) -> None:
    meta = {
        "artifact_version": __version__,
        "prng_algorithm": PRNG_ALGORITHM,
        "grid": {
            "speeds_mps": list(grid.speeds_mps),
            "altitudes_m": list(grid.altitudes_m),
            "reps": grid.reps,
            "scenarios": [s.id.value for s in grid.scenarios],
        },
        "overrides": dict(overrides) if overrides else {},
        "resolved_config": run_config_to_dict(example_config),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sweep_to_dir(
    grid: GridSpec,
    out_dir: str,
    parallelism: int = 1,
    overrides: Mapping[str, Any] | None = None,
) -> list[str]:
    """Run the sweep and write runs.csv, per-KPI heatmap/CDF files, and
    meta.json under ``out_dir``. Returns one summary line per scenario."""
    os.makedirs(out_dir, exist_ok=True)
    records = run_grid(grid, parallelism, overrides=overrides)
    write_runs_csv(records, os.path.join(out_dir, "runs.csv"))
    summaries = []
    for spec in grid.scenarios:
        label = spec.id.value
        scen_records = [r for r in records if r.scenario_id == label]
        for kpi in SWEEP_OUTPUT_KPIS:
            table = aggregate_heatmap(scen_records, kpi, label)
            write_heatmap_csv(table, os.path.join(out_dir, f"heatmap_{kpi}_{label}.csv"))
            getter, include_undetected = KPI_FIELDS[kpi]
            values = [
                getter(r) for r in scen_records if include_undetected or r.detected
            ]
            values = [v for v in values if v is not None]
            if values:
                curve = cdf_with_band(values)
                write_cdf_csv(curve, os.path.join(out_dir, f"cdf_{kpi}_{label}.csv"))
        detected = [r for r in scen_records if r.detected]
        delays = sorted(r.detect_mitigate_delay_s for r in detected)
        med = median(delays) if delays else float("nan")
        summaries.append(
            f"scenario={label} runs={len(scen_records)} detected={len(detected)} "
            f"median_delay_s={med:.6f}"
        )
    example = make_run_config(
        grid.scenarios[0],
        grid.speeds_mps[len(grid.speeds_mps) // 2],
        grid.altitudes_m[len(grid.altitudes_m) // 2],
        0,
        overrides=overrides,
    )
    write_meta(os.path.join(out_dir, "meta.json"), grid, overrides, example)
    return summaries
