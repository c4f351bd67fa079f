"""Figure jobs over sweep CSV files.

The only coupling to the simulator is the file schemas:
  heatmap_<kpi>_<scenario>.csv  (first row altitudes, first column speeds)
  cdf_<kpi>_<scenario>.csv      (columns x,F,band_lo,band_hi)
Every CDF is validated non-decreasing before anything is drawn.
"""
from __future__ import annotations

import csv
import math
import os
import re
from dataclasses import dataclass
from enum import Enum

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

FALLBACK_DEADLINE_S = 2.0

KPI_TITLES = {
    "delay_s": "detect-to-mitigate delay (s)",
    "extra_handovers": "extra handovers before lockdown",
    "patrol_ho_rate_per_min": "patrol handover rate (per min)",
}

STRESS_SCENARIOS = ("stress_no_fallback", "stress_fallback")


class MalformedInputError(Exception):
    """A sweep CSV failed schema or monotonicity validation."""


class FigureKind(str, Enum):
    HEATMAP = "heatmap"
    CDF_WITH_BAND = "cdf"
    STRESS_COMPARE = "stress_compare"


@dataclass(frozen=True)
class FigureJob:
    kpi: str
    scenarios: tuple[str, ...]
    in_dir: str
    out_path: str
    kind: FigureKind


def _fail(path: str, row: int, message: str):
    raise MalformedInputError(f"{path}, row {row}: {message}")


def load_heatmap(path: str):
    """Parse a heatmap CSV into (speeds, altitudes, cells with NaN gaps)."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise MalformedInputError(f"{path}: {exc}") from None
    if len(rows) < 2 or len(rows[0]) < 2:
        _fail(path, 1, "expected an altitude header row and at least one speed row")
    try:
        altitudes = [float(v) for v in rows[0][1:]]
    except ValueError:
        _fail(path, 1, f"altitude header is not numeric: {rows[0][1:]!r}")
    speeds, cells = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 1 + len(altitudes):
            _fail(path, i, f"expected {1 + len(altitudes)} columns, found {len(row)}")
        try:
            speeds.append(float(row[0]))
        except ValueError:
            _fail(path, i, f"speed column is not numeric: {row[0]!r}")
        line = []
        for j, cell in enumerate(row[1:]):
            if cell == "":
                line.append(math.nan)
                continue
            try:
                line.append(float(cell))
            except ValueError:
                _fail(path, i, f"cell {j} is not numeric: {cell!r}")
        cells.append(line)
    return np.asarray(speeds), np.asarray(altitudes), np.asarray(cells)


def load_cdf(path: str):
    """Parse a CDF CSV into (x, F, lo, hi); reject non-monotone curves."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise MalformedInputError(f"{path}: {exc}") from None
    if not rows or rows[0] != ["x", "F", "band_lo", "band_hi"]:
        _fail(path, 1, f"expected header x,F,band_lo,band_hi, found {rows[:1]!r}")
    data = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            _fail(path, i, f"expected 4 columns, found {len(row)}")
        try:
            data.append(tuple(float(v) for v in row))
        except ValueError:
            _fail(path, i, f"non-numeric value in {row!r}")
    if not data:
        _fail(path, 2, "no data rows")
    xs, fs, lo, hi = (np.asarray(col) for col in zip(*data))
    tol = 1e-9
    for name, series in (("x", xs), ("F", fs)):
        drops = np.where(np.diff(series) < -tol)[0]
        if drops.size:
            _fail(path, int(drops[0]) + 3, f"{name} decreases; curve is not a CDF")
    if np.any(lo > hi + tol):
        bad = int(np.where(lo > hi + tol)[0][0])
        _fail(path, bad + 2, "band_lo exceeds band_hi")
    if np.any(fs < -tol) or np.any(fs > 1 + tol):
        _fail(path, 2, "F leaves [0, 1]")
    return xs, fs, lo, hi


def _render_heatmap(job: FigureJob) -> str:
    panels = []
    for scenario in job.scenarios:
        path = os.path.join(job.in_dir, f"heatmap_{job.kpi}_{scenario}.csv")
        panels.append((scenario, *load_heatmap(path)))
    finite = [c[np.isfinite(c)] for _, _, _, c in panels]
    finite = np.concatenate([f for f in finite if f.size]) if any(f.size for f in finite) else np.array([0.0])
    vmin, vmax = float(finite.min()), float(finite.max())
    if vmin == vmax:
        vmax = vmin + 1.0
    fig, axes = plt.subplots(
        1, len(panels), figsize=(4.2 * len(panels), 3.6), squeeze=False, constrained_layout=True
    )
    mesh = None
    for ax, (scenario, speeds, altitudes, cells) in zip(axes[0], panels):
        masked = np.ma.masked_invalid(cells)
        mesh = ax.pcolormesh(
            altitudes, speeds, masked, shading="nearest", vmin=vmin, vmax=vmax, cmap="viridis"
        )
        ax.set_title(scenario, fontsize=10)
        ax.set_xlabel("altitude (m)")
        ax.set_ylabel("speed (m/s)")
        ax.set_xticks(altitudes)
        ax.set_yticks(speeds)
    fig.colorbar(mesh, ax=axes[0], label=KPI_TITLES.get(job.kpi, job.kpi))
    fig.suptitle(f"median {KPI_TITLES.get(job.kpi, job.kpi)}", fontsize=11)
    fig.savefig(job.out_path, dpi=130)
    plt.close(fig)
    return job.out_path


def _render_cdf(job: FigureJob) -> str:
    fig, ax = plt.subplots(figsize=(5.4, 3.8), constrained_layout=True)
    for scenario in job.scenarios:
        path = os.path.join(job.in_dir, f"cdf_{job.kpi}_{scenario}.csv")
        xs, fs, lo, hi = load_cdf(path)
        line, = ax.plot(xs, fs, label=scenario, drawstyle="steps-post")
        ax.fill_between(xs, lo, hi, alpha=0.2, color=line.get_color(), step="post")
    ax.set_xlabel(KPI_TITLES.get(job.kpi, job.kpi))
    ax.set_ylabel("F(x)")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    ax.set_title(f"pooled CDF, {KPI_TITLES.get(job.kpi, job.kpi)}", fontsize=11)
    fig.savefig(job.out_path, dpi=130)
    plt.close(fig)
    return job.out_path


def _render_stress_compare(job: FigureJob) -> str:
    fig, ax = plt.subplots(figsize=(5.4, 3.8), constrained_layout=True)
    for scenario in job.scenarios:
        path = os.path.join(job.in_dir, f"cdf_{job.kpi}_{scenario}.csv")
        xs, fs, lo, hi = load_cdf(path)
        line, = ax.plot(xs, fs, label=scenario, drawstyle="steps-post")
        ax.fill_between(xs, lo, hi, alpha=0.2, color=line.get_color(), step="post")
    ax.axvline(FALLBACK_DEADLINE_S, color="crimson", linestyle="--", linewidth=1.2,
               label=f"fallback deadline {FALLBACK_DEADLINE_S:g} s")
    ax.set_xlabel(KPI_TITLES.get(job.kpi, job.kpi))
    ax.set_ylabel("F(x)")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    ax.set_title("stress case: long outages with and without local fallback", fontsize=11)
    fig.savefig(job.out_path, dpi=130)
    plt.close(fig)
    return job.out_path


def render(job: FigureJob) -> str:
    """Render one figure job to its PNG; returns the output path."""
    os.makedirs(os.path.dirname(job.out_path) or ".", exist_ok=True)
    if job.kind is FigureKind.HEATMAP:
        return _render_heatmap(job)
    if job.kind is FigureKind.CDF_WITH_BAND:
        return _render_cdf(job)
    return _render_stress_compare(job)


def default_jobs(in_dir: str, out_dir: str) -> list[FigureJob]:
    """Discover renderable figure families from the files present."""
    names = set(os.listdir(in_dir))
    jobs: list[FigureJob] = []
    for kpi in KPI_TITLES:
        pattern = re.compile(rf"^heatmap_{re.escape(kpi)}_(.+)\.csv$")
        found = [m.group(1) for m in map(pattern.match, names) if m]
        # stress scenarios belong to the dedicated comparison figure
        scenarios = sorted(s for s in found if s not in STRESS_SCENARIOS)
        if scenarios:
            jobs.append(FigureJob(
                kpi, tuple(scenarios), in_dir,
                os.path.join(out_dir, f"fig_{kpi}_heatmap.png"), FigureKind.HEATMAP,
            ))
        with_cdf = [s for s in scenarios if f"cdf_{kpi}_{s}.csv" in names]
        if with_cdf:
            jobs.append(FigureJob(
                kpi, tuple(with_cdf), in_dir,
                os.path.join(out_dir, f"fig_{kpi}_cdf.png"), FigureKind.CDF_WITH_BAND,
            ))
    if all(f"cdf_delay_s_{s}.csv" in names for s in STRESS_SCENARIOS):
        jobs.append(FigureJob(
            "delay_s", STRESS_SCENARIOS, in_dir,
            os.path.join(out_dir, "fig_delay_s_stress_compare.png"),
            FigureKind.STRESS_COMPARE,
        ))
    return jobs
