"""CLI contract: subcommands, exit codes, output formats, determinism."""
import csv
import json
import os

import pytest

from corridorsim import cli
from corridorsim.backhaul import CommandOutcome, CommandPath


def _run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- run ----------------------------------------------------------------------

def test_run_json_terrestrial_delay_zero(capsys):
    code, out, _ = _run_cli(
        capsys,
        ["run", "--scenario", "terrestrial", "--speed", "12", "--alt", "120",
         "--rep", "0", "--json"],
    )
    assert code == 0
    data = json.loads(out)
    assert data["scenario"] == "terrestrial"
    if data["detected"]:
        assert data["delay_s"] == 0.0
        assert data["path"] == "immediate"
    else:
        assert data["delay_s"] is None


def test_run_detected_terrestrial_json(capsys):
    # rep chosen so the run detects; scan a few reps to stay robust
    for rep in range(40):
        code, out, _ = _run_cli(
            capsys,
            ["run", "--scenario", "terrestrial", "--speed", "12", "--alt", "120",
             "--rep", str(rep), "--json"],
        )
        assert code == 0
        data = json.loads(out)
        if data["detected"]:
            assert data["delay_s"] == 0.0
            assert data["path"] == "immediate"
            return
    raise AssertionError("no detected terrestrial run in 40 reps")


def test_run_repeat_byte_identical(capsys):
    argv = ["run", "--scenario", "leo_outage", "--speed", "9", "--alt", "90",
            "--rep", "3", "--json"]
    _, first, _ = _run_cli(capsys, argv)
    _, second, _ = _run_cli(capsys, argv)
    assert first == second


def test_run_unknown_scenario_exits_2(capsys):
    code, _, err = _run_cli(capsys, ["run", "--scenario", "bogus"])
    assert code == 2
    assert "bogus" in err


def test_run_human_table(capsys):
    code, out, _ = _run_cli(
        capsys, ["run", "--scenario", "terrestrial", "--speed", "6", "--alt", "60", "--rep", "1"]
    )
    assert code == 0
    assert "patrol_ho_rate_per_min" in out


def test_run_config_overlay_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"uav_speed_mps": 9.0, "handover": {"hysteresis_db": 4.0}}))
    code, out, _ = _run_cli(
        capsys,
        ["run", "--scenario", "terrestrial", "--alt", "120", "--rep", "0",
         "--config", str(cfg), "--json"],
    )
    assert code == 0
    assert json.loads(out)["speed_mps"] == 9.0
    # flag wins over the config file
    code, out, _ = _run_cli(
        capsys,
        ["run", "--scenario", "terrestrial", "--speed", "15", "--alt", "120",
         "--rep", "0", "--config", str(cfg), "--json"],
    )
    assert json.loads(out)["speed_mps"] == 15.0


def test_run_rejects_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"not_a_field": 1}))
    code, _, err = _run_cli(
        capsys, ["run", "--scenario", "terrestrial", "--config", str(cfg)]
    )
    assert code == 2
    assert "not_a_field" in err


# --- sweep ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def small_sweep_args(tmp_path_factory):
    """A reduced grid via config overlay keeps CLI sweep tests quick."""
    cfg = tmp_path_factory.mktemp("cfg") / "small.json"
    cfg.write_text(json.dumps({"sim_time_s": 50.0}))
    return ["--config", str(cfg)]


def test_sweep_writes_outputs(tmp_path, capsys, small_sweep_args):
    out_dir = tmp_path / "sweep"
    code, out, _ = _run_cli(
        capsys,
        ["sweep", "--scenarios", "terrestrial", "--out-dir", str(out_dir)] + small_sweep_args,
    )
    assert code == 0
    assert "scenario=terrestrial" in out
    with open(out_dir / "runs.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 5 * 5 * 20
    assert os.path.exists(out_dir / "meta.json")


def test_sweep_jobs_deterministic(tmp_path, capsys, small_sweep_args):
    a = tmp_path / "a"
    b = tmp_path / "b"
    code1, _, _ = _run_cli(
        capsys,
        ["sweep", "--scenarios", "leo_outage", "--out-dir", str(a), "--jobs", "1"]
        + small_sweep_args,
    )
    code2, _, _ = _run_cli(
        capsys,
        ["sweep", "--scenarios", "leo_outage", "--out-dir", str(b), "--jobs", "2"]
        + small_sweep_args,
    )
    assert code1 == code2 == 0
    assert (a / "runs.csv").read_bytes() == (b / "runs.csv").read_bytes()


def test_sweep_empty_scenarios_exits_2(tmp_path, capsys):
    code, _, err = _run_cli(capsys, ["sweep", "--scenarios", "", "--out-dir", str(tmp_path)])
    assert code == 2


def test_sweep_unwritable_out_dir_exits_3(tmp_path, capsys, small_sweep_args):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    code, _, err = _run_cli(
        capsys,
        ["sweep", "--scenarios", "terrestrial", "--out-dir", str(blocker)] + small_sweep_args,
    )
    assert code == 3


# --- sensitivity ----------------------------------------------------------------

def test_sensitivity_unknown_axis_exits_2(tmp_path, capsys):
    code, _, err = _run_cli(
        capsys, ["sensitivity", "--axis", "foo", "--values", "1", "--out-dir", str(tmp_path)]
    )
    assert code == 2
    assert "foo" in err


def test_sensitivity_writes_tagged_runs(tmp_path, capsys, small_sweep_args):
    out_dir = tmp_path / "sens"
    code, out, _ = _run_cli(
        capsys,
        ["sensitivity", "--axis", "outage-rate", "--values", "0.01,0.05",
         "--out-dir", str(out_dir)] + small_sweep_args,
    )
    assert code == 0
    names = sorted(os.listdir(out_dir))
    assert "runs_outage-rate=0.01.csv" in names
    assert "runs_outage-rate=0.05.csv" in names
    assert "sensitivity_summary.csv" in names
    with open(out_dir / "runs_outage-rate=0.01.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[1][0] == "leo_outage+lam=0.01"
    with open(out_dir / "sensitivity_summary.csv") as fh:
        summary = list(csv.reader(fh))
    assert summary[0] == ["axis", "value", "scenario", "runs", "detected", "median_delay_s"]
    assert len(summary) == 1 + 2 * 2  # two values x two scenarios


# --- check -----------------------------------------------------------------------

def test_check_passes_on_healthy_build(capsys):
    code, out, _ = _run_cli(capsys, ["check"])
    assert code == 0
    for name in ("a3-oracle", "detector-oracle", "poisson-rate", "fallback-cap"):
        assert f"[PASS] {name}" in out


def test_check_fails_when_fallback_cap_is_broken(capsys, monkeypatch):
    """Fault injection: an apply-time that ignores the deadline must trip the
    fallback-cap check and name it."""
    from corridorsim import backhaul as bh
    from corridorsim import selfcheck

    real = bh.command_apply_time

    def broken(t_issue, cfg, schedule, latency):
        out = real(t_issue, cfg, schedule, latency)
        if out.path is CommandPath.FALLBACK:
            # pretend the deadline was never enforced
            return CommandOutcome(t_issue, t_issue + cfg.fallback_deadline_s + 5.0,
                                  CommandPath.REMOTE)
        return out

    monkeypatch.setattr(selfcheck.bh, "command_apply_time", broken)
    code, out, err = _run_cli(capsys, ["check"])
    assert code == 1
    assert "fallback-cap" in err
    assert "[FAIL] fallback-cap" in out
