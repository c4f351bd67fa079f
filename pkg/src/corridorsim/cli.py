"""Command-line frontend: single runs, full sweeps, sensitivity sweeps,
and the fast self-check suite.

Exit codes: 0 ok, 1 check failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from statistics import median
from typing import Any, Mapping

from .engine import simulate
from .scenario import (
    SCENARIOS,
    ConfigError,
    ScenarioId,
    load_config_file,
    make_run_config,
    scenario_by_name,
)
from .selfcheck import run_all_checks
from .sweep import (
    GridSpec,
    SensitivityAxis,
    SensitivitySpec,
    run_sensitivity,
    sweep_to_dir,
    write_runs_csv,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _deep_merge(base: Mapping[str, Any], extra: Mapping[str, Any]) -> dict[str, Any]:
    out = dict(base)
    for key, value in extra.items():
        if key in out and isinstance(out[key], Mapping) and isinstance(value, Mapping):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def _load_overrides(config_path: str | None) -> dict[str, Any]:
    if not config_path:
        return {}
    return load_config_file(config_path)


def _record_as_dict(record) -> dict[str, Any]:
    return {
        "scenario": record.scenario_id,
        "speed_mps": record.uav_speed_mps,
        "altitude_m": record.uav_altitude_m,
        "rep": record.rep,
        "seed": record.seed,
        "detected": record.detected,
        "t_detect_s": record.t_detect_s,
        "t_apply_s": record.t_apply_s,
        "delay_s": record.detect_mitigate_delay_s,
        "path": record.mitigation_path.value if record.mitigation_path else None,
        "extra_handovers": record.extra_handovers,
        "patrol_ho_rate_per_min": record.patrol_ho_rate_per_min,
        "dwell_before_lock_s": record.dwell_before_lock_s,
        "nfz_violation_steps": record.nfz_violation_steps,
        "uav_total_hos": record.uav_total_hos,
        "patrol_total_hos": record.patrol_total_hos,
    }


def cmd_run(args: argparse.Namespace) -> int:
    try:
        scenario = scenario_by_name(args.scenario)
    except ConfigError as exc:
        print(f"error: --scenario: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        overrides = _load_overrides(args.config)
        speed = args.speed if args.speed is not None else overrides.pop("uav_speed_mps", 12.0)
        altitude = args.alt if args.alt is not None else overrides.pop("uav_altitude_m", 120.0)
        rep = args.rep if args.rep is not None else overrides.pop("rep", 0)
        if args.speed is not None:
            overrides.pop("uav_speed_mps", None)
        if args.alt is not None:
            overrides.pop("uav_altitude_m", None)
        if args.rep is not None:
            overrides.pop("rep", None)
        config = make_run_config(scenario, speed, altitude, rep, overrides=overrides)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    record = simulate(config)
    data = _record_as_dict(record)
    if args.json:
        print(json.dumps(data, sort_keys=True))
    else:
        width = max(len(k) for k in data)
        for key, value in data.items():
            print(f"{key:<{width}}  {value}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    names = [s for s in (args.scenarios or "").split(",") if s]
    if not names:
        print("error: --scenarios must name at least one scenario", file=sys.stderr)
        return EXIT_USAGE
    try:
        scenarios = tuple(scenario_by_name(n) for n in names)
    except ConfigError as exc:
        print(f"error: --scenarios: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        overrides = _load_overrides(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: --config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    grid = GridSpec(scenarios=scenarios)
    try:
        summaries = sweep_to_dir(grid, args.out_dir, args.jobs, overrides=overrides or None)
    except OSError as exc:
        print(f"error: cannot write to {args.out_dir}: {exc}", file=sys.stderr)
        return EXIT_IO
    for line in summaries:
        print(line)
    return EXIT_OK


def cmd_sensitivity(args: argparse.Namespace) -> int:
    try:
        axis = SensitivityAxis(args.axis)
    except ValueError:
        known = ", ".join(a.value for a in SensitivityAxis)
        print(f"error: --axis: unknown axis '{args.axis}' (known: {known})", file=sys.stderr)
        return EXIT_USAGE
    try:
        values = tuple(float(v) for v in args.values.split(",")) if args.values else ()
    except ValueError:
        print("error: --values must be a comma-separated list of numbers", file=sys.stderr)
        return EXIT_USAGE
    try:
        overrides = _load_overrides(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    spec = SensitivitySpec(axis=axis, values=values)
    grid = GridSpec(
        scenarios=(SCENARIOS[ScenarioId.LEO_OUTAGE], SCENARIOS[ScenarioId.LEO_OUTAGE_FALLBACK])
    )
    try:
        os.makedirs(args.out_dir, exist_ok=True)
        by_value = run_sensitivity(spec, grid, args.jobs, overrides=overrides or None)
        summary_path = os.path.join(args.out_dir, "sensitivity_summary.csv")
        with open(summary_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["axis", "value", "scenario", "runs", "detected", "median_delay_s"]
            )
            for value, records in by_value.items():
                tag = f"{spec.axis.value}={value:g}"
                write_runs_csv(records, os.path.join(args.out_dir, f"runs_{tag}.csv"))
                for label in sorted({r.scenario_id for r in records}):
                    rows = [r for r in records if r.scenario_id == label]
                    detected = [r for r in rows if r.detected]
                    delays = sorted(r.detect_mitigate_delay_s for r in detected)
                    writer.writerow(
                        [
                            spec.axis.value,
                            f"{value:g}",
                            label,
                            len(rows),
                            len(detected),
                            f"{median(delays):.6f}" if delays else "",
                        ]
                    )
    except OSError as exc:
        print(f"error: cannot write to {args.out_dir}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(by_value)} sensitivity grids to {args.out_dir}")
    return EXIT_OK


def cmd_check(_args: argparse.Namespace) -> int:
    results = run_all_checks()
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: {r.detail}")
    if failed:
        print(f"check failed: {failed[0].name}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corridorsim",
        description="UAV intrusion detect-to-mitigate simulator for a 5G border corridor",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_run = sub.add_parser("run", help="simulate one run and print its KPI record")
    p_run.add_argument("--scenario", required=True, help="scenario name from the catalogue")
    p_run.add_argument("--speed", type=float, default=None, help="UAV speed in m/s")
    p_run.add_argument("--alt", type=float, default=None, help="UAV altitude in m")
    p_run.add_argument("--rep", type=int, default=None, help="Monte Carlo repetition index")
    p_run.add_argument("--config", default=None, help="JSON config overlay file")
    p_run.add_argument("--json", action="store_true", help="print a single JSON object")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the Monte Carlo grid and write CSV outputs")
    p_sweep.add_argument(
        "--scenarios",
        default="terrestrial,leo_outage,leo_outage_fallback",
        help="comma-separated scenario names",
    )
    p_sweep.add_argument("--out-dir", required=True, help="output directory")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sweep.add_argument("--config", default=None, help="JSON config overlay file")
    p_sweep.set_defaults(func=cmd_sweep)

    p_sens = sub.add_parser("sensitivity", help="sweep one parameter axis over the LEO grids")
    p_sens.add_argument("--axis", required=True, help="hysteresis | ho-threshold | outage-rate")
    p_sens.add_argument("--values", default=None, help="comma-separated axis values")
    p_sens.add_argument("--out-dir", required=True, help="output directory")
    p_sens.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sens.add_argument("--config", default=None, help="JSON config overlay file")
    p_sens.set_defaults(func=cmd_sensitivity)

    p_check = sub.add_parser("check", help="run the fast invariant self-checks")
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
