import json

import pytest

from builders import at, make_pass
from iotscheduler.campaign.PassIngest import write_passes
from iotscheduler.controllers.CampaignController import CampaignController
from iotscheduler.core.CampaignConfig import CampaignSpec, Requirement
from iotscheduler.core.ScheduleModel import PassCatalog, ProcedureType
from iotscheduler.scripts.iotsched_cli import (
    EXIT_INTERNAL,
    EXIT_INVALID,
    EXIT_NO_FEASIBLE,
    EXIT_OK,
    OUTPUT_DIR_ENV,
    main,
)

SMALL_SYNTH = ["--seed", "3", "--sats", "3", "--days", "2", "--riot-sats", "1"]
FAST_NSGA = ["--population-size", "20", "--evals", "400"]
COMPARISON_COLUMNS = ["metric", "algorithm_a", "algorithm_b", "u", "p_value", "significant",
                      "a12", "magnitude", "mean_a", "mean_b"]
COMPARISON_FIELDS = set(COMPARISON_COLUMNS)
RUN_FIELDS = {"algorithm", "source", "seed", "front_size", "HV", "GD", "SP"}


@pytest.fixture(autouse=True)
def no_output_env(monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


@pytest.fixture
def synth_dir(tmp_path):
    out = tmp_path / "scn"
    assert main(["synth", *SMALL_SYNTH, "--out", str(out)]) == EXIT_OK
    return out


def _files(d):
    return ["--scenario", str(d / "scenario.json"), "--passes", str(d / "passes.csv")]


def _write_campaign(out, passes, requirements):
    catalog = PassCatalog(site_id="GS01", window=(at("00:00"), at("00:00", day=1)), passes=passes)
    write_passes(catalog, out / "passes.csv")
    spec = CampaignSpec(site_id="GS01", window=catalog.window,
                        satellites=sorted({r.satellite_id for r in requirements}),
                        requirements=requirements)
    (out / "scenario.json").write_text(spec.model_dump_json())
    return out


@pytest.fixture
def clashing_dir(tmp_path):
    """Two satellites whose only passes culminate together: no feasible schedule exists."""
    passes = (make_pass("sat01", at("10:00"), at("12:00"), t_max=at("11:00")),
              make_pass("sat02", at("10:00"), at("12:00"), t_max=at("11:00")))
    reqs = [Requirement(satellite_id=s, proc_type=ProcedureType.SQM) for s in ("sat01", "sat02")]
    return _write_campaign(tmp_path, passes, reqs)


# --- synth ---

def test_synth_is_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        assert main(["synth", "--seed", "7", "--sats", "6", "--days", "3", "--out", str(tmp_path / name)]) == 0
    for fname in ("passes.csv", "scenario.json"):
        assert (tmp_path / "a" / fname).read_bytes() == (tmp_path / "b" / fname).read_bytes()
    assert "Satellite" in capsys.readouterr().out


def test_synth_riot_fraction(tmp_path):
    out = tmp_path / "half"
    assert main(["synth", "--sats", "6", "--riot-fraction", "0.5", "--out", str(out)]) == 0
    spec = json.loads((out / "scenario.json").read_text())
    riot = [r for r in spec["requirements"] if r["proc_type"] == "RIOT"]
    assert len(riot) == 3


def test_synth_json_format(tmp_path):
    out = tmp_path / "j"
    assert main(["synth", *SMALL_SYNTH, "--format", "json", "--out", str(out)]) == 0
    assert json.loads((out / "passes.json").read_text())["site_id"] == "GS01"


def test_missing_output_path_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--seed", "1"])
    assert exc.value.code == EXIT_INVALID


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
    assert main(["synth", *SMALL_SYNTH]) == 0
    assert (tmp_path / "env" / "scenario.json").is_file()


# --- candidates ---

def test_candidates_dump(synth_dir, tmp_path, capsys):
    out = tmp_path / "cands"
    assert main(["candidates", *_files(synth_dir), "--out", str(out)]) == 0
    assert (out / "candidates.csv").is_file()
    assert json.loads((out / "conflict_stats.json").read_text())["vertices"] > 0
    assert "Conflict graph" in capsys.readouterr().out


def test_candidates_dump_defaults_to_output_env(synth_dir, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
    assert main(["candidates", *_files(synth_dir)]) == 0
    assert (tmp_path / "env" / "candidates" / "candidates.csv").is_file()


def test_internal_value_error_is_not_invalid_input(synth_dir, monkeypatch):
    def broken(self, scenario, out_dir=None):
        raise ValueError("operands could not be broadcast together")

    monkeypatch.setattr(CampaignController, "candidates", broken)
    assert main(["candidates", *_files(synth_dir)]) == EXIT_INTERNAL


# --- optimize ---

def test_optimize_nsga3_writes_archive(synth_dir, tmp_path):
    out = tmp_path / "run"
    code = main(["optimize", *_files(synth_dir), "--algo", "nsga3", "--seed", "1", *FAST_NSGA,
                 "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads((out / "archive.json").read_text())
    assert doc["feasible"] and doc["evals"] == 400
    assert all(e["fitness_raw"]["violations"] == 0 for e in doc["entries"])
    assert (out / "slots_000.csv").is_file()


def test_default_run_directory_under_environment(synth_dir, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
    main(["optimize", *_files(synth_dir), "--algo", "rs", "--seed", "4", "--evals", "40"])
    assert (tmp_path / "env" / "rs-seed4" / "archive.json").is_file()


def test_both_budgets_are_respected(synth_dir, tmp_path):
    out = tmp_path / "run"
    main(["optimize", *_files(synth_dir), "--algo", "rs", "--evals", "1000", "--wallclock", "60",
          "--population-size", "50", "--out", str(out)])
    telemetry = json.loads((out / "telemetry.json").read_text())
    assert telemetry["evals"] <= 1000
    assert telemetry["stop_reason"] in ("eval_budget", "wallclock")
    assert all(r["evals"] <= 1000 for r in telemetry["records"])


def test_no_feasible_schedule_exit_code(clashing_dir, tmp_path):
    out = tmp_path / "run"
    code = main(["optimize", *_files(clashing_dir), "--algo", "rs", "--evals", "30", "--out", str(out)])
    assert code == EXIT_NO_FEASIBLE
    doc = json.loads((out / "archive.json").read_text())
    assert doc["feasible"] is False
    assert all(e["fitness_raw"]["violations"] == 1 for e in doc["entries"])


def test_uncoverable_requirement_is_invalid_input(tmp_path, capsys):
    passes = (make_pass("sat01", at("10:00"), at("12:00"), theta_start=8.0, theta_end=8.0),)
    reqs = [Requirement(satellite_id="sat01", proc_type=ProcedureType.RIOT)]
    _write_campaign(tmp_path, passes, reqs)
    code = main(["optimize", *_files(tmp_path), "--out", str(tmp_path / "run")])
    assert code == EXIT_INVALID
    assert "RIOT/sat01" in capsys.readouterr().err


def test_missing_pass_file(tmp_path, synth_dir):
    code = main(["optimize", "--scenario", str(synth_dir / "scenario.json"),
                 "--passes", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "run")])
    assert code == EXIT_INVALID


def test_out_of_range_setting_is_invalid(synth_dir, tmp_path):
    code = main(["optimize", *_files(synth_dir), "--population-size", "2", "--out", str(tmp_path / "run")])
    assert code == EXIT_INVALID


def test_flag_for_another_algorithm_is_a_usage_error(synth_dir, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["optimize", *_files(synth_dir), "--algo", "rs", "--ants", "5", "--out", str(tmp_path / "run")])
    assert exc.value.code == EXIT_INVALID


def test_manifest_replay_is_byte_identical(synth_dir, tmp_path):
    first = tmp_path / "first"
    main(["optimize", *_files(synth_dir), "--seed", "2", *FAST_NSGA, "--workers", "2", "--out", str(first)])
    second = tmp_path / "second"
    main(["optimize", "--manifest", str(first / "manifest.json"), "--out", str(second)])
    for fname in ("archive.json", "telemetry.json", "slots_000.csv"):
        assert (first / fname).read_bytes() == (second / fname).read_bytes()


# --- evaluate / export ---

def test_evaluate_and_export(synth_dir, tmp_path, capsys):
    for algo in ("nsga3", "rs"):
        for seed in ("0", "1"):
            main(["optimize", *_files(synth_dir), "--algo", algo, "--seed", seed,
                  "--population-size", "20", "--evals", "100", "--out", str(tmp_path / f"{algo}{seed}")])
    archives = [str(tmp_path / d / "archive.json") for d in ("nsga30", "nsga31", "rs0", "rs1")]
    report_dir = tmp_path / "report"
    assert main(["evaluate", *archives, "--hv-ref", "1.2", "1.2", "1.2", "--out", str(report_dir)]) == 0
    report = json.loads((report_dir / "report.json").read_text())
    assert report["hv_reference_point"] == [1.2, 1.2, 1.2]
    assert {c["metric"] for c in report["comparisons"]} == {"HV", "GD", "SP"}
    assert set(report) == {"hv_reference_point", "alpha", "reference_front", "runs", "comparisons", "notices"}
    assert all(set(c) == COMPARISON_FIELDS for c in report["comparisons"])
    assert all(set(r) == RUN_FIELDS for r in report["runs"])
    header = (report_dir / "report_comparisons.csv").read_text().splitlines()[0]
    assert header.split(",") == COMPARISON_COLUMNS

    assert main(["evaluate", archives[0]]) == 0
    assert "statistics skipped" in capsys.readouterr().out

    gantt = tmp_path / "gantt"
    assert main(["export", archives[0], "--out", str(gantt)]) == 0
    assert (gantt / "slots_000.csv").read_text().splitlines()[0] == "slot_start,slot_end,procedures"
    assert (gantt / "slots_000_procedures.csv").is_file()


def test_missing_archive_is_invalid_input(tmp_path):
    assert main(["evaluate", str(tmp_path / "absent.json")]) == EXIT_INVALID
