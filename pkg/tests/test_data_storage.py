import json

import pandas as pd
import pytest

from iotscheduler.analyzers.FrontComparisonAnalyzer import FrontComparisonAnalyzer
from iotscheduler.controllers.CampaignController import CampaignController
from iotscheduler.core.CampaignConfig import RunManifest
from iotscheduler.core.DataStorage import (
    ARCHIVE_FILE,
    MANIFEST_FILE,
    PROCEDURE_SEP,
    TELEMETRY_FILE,
    Importer,
    gantt_frame,
    procedure_frame,
)
from iotscheduler.core.Exceptions import IndicatorError, SchedulingError

BUDGETS = {"nsga3": {"population_size": 20, "eval_budget": 200}, "rs": {"population_size": 20, "eval_budget": 200}}


@pytest.fixture
def runs(tmp_path, scenario_files):
    """Two seeds each of nsga3 and rs on the same scenario; returns {(algo, seed): run dir}."""
    passes, scenario_path = scenario_files
    ctrl = CampaignController()
    scenario = ctrl.load_scenario(scenario_path, passes)
    out = {}
    for algo, overrides in BUDGETS.items():
        for seed in (0, 1):
            run_dir = tmp_path / "runs" / f"{algo}-seed{seed}"
            manifest = RunManifest(scenario_path=scenario_path, passes_path=passes, algorithm=algo,
                                   overrides=overrides, seed=seed, output_dir=run_dir)
            ctrl.optimize(manifest, scenario=scenario)
            out[(algo, seed)] = run_dir
    return out


def test_run_directory_layout(runs):
    run_dir = runs[("nsga3", 0)]
    for name in (ARCHIVE_FILE, TELEMETRY_FILE, MANIFEST_FILE):
        assert (run_dir / name).is_file()
    doc = json.loads((run_dir / ARCHIVE_FILE).read_text())
    assert doc["algorithm"] == "nsga3"
    assert doc["seed"] == 0
    assert doc["n_objectives"] == 3
    assert doc["evals"] == 200
    assert len(list(run_dir.glob("slots_???.csv"))) == len(doc["entries"])
    assert len(list(run_dir.glob("slots_???_procedures.csv"))) == len(doc["entries"])
    telemetry = json.loads((run_dir / TELEMETRY_FILE).read_text())
    assert telemetry["records"][-1]["evals"] == 200
    manifest = json.loads((run_dir / MANIFEST_FILE).read_text())
    assert manifest["algorithm"] == "nsga3" and manifest["overrides"]["eval_budget"] == 200


def test_both_algorithms_share_one_schema(runs):
    keys = {algo: set(json.loads((d / ARCHIVE_FILE).read_text())) for (algo, _), d in runs.items()}
    assert keys["nsga3"] == keys["rs"]


def test_importer_reads_archives(runs):
    imp = Importer.load_archive(runs[("rs", 1)])
    assert imp.algorithm == "rs"
    assert imp.metadata["seed"] == 1
    assert imp.metadata["source"].endswith(ARCHIVE_FILE)
    points = imp.front_points()
    assert points.shape[1] == 3
    assert len(points) == sum(e["fitness_raw"]["violations"] == 0 for e in imp.entries)


def test_importer_rejects_bad_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(SchedulingError, match="not a valid archive"):
        Importer.load_archive(bad)
    bad.write_text(json.dumps({"algorithm": "rs"}))
    with pytest.raises(SchedulingError, match="entries"):
        Importer.load_archive(bad)


def test_gantt_csv_has_one_row_per_slot(runs):
    run_dir = runs[("nsga3", 0)]
    record = Importer.load_archive(run_dir).entries[0]
    text = (run_dir / "slots_000.csv").read_text()
    assert text.splitlines()[0] == "slot_start,slot_end,procedures"

    frame = gantt_frame(record)
    assert len(frame) == len(record["slots"])
    assert list(frame["slot_start"]) == [s["t_start"] for s in record["slots"]]
    listed = [pid for cell in frame["procedures"] for pid in cell.split(PROCEDURE_SEP)]
    assert sorted(listed) == sorted(p["id"] for p in record["procedures"])


def test_procedure_frame_tags_each_procedure_with_its_slot(runs):
    record = Importer.load_archive(runs[("nsga3", 0)]).entries[0]
    frame = procedure_frame(record)
    assert sorted(frame["procedure"]) == sorted(p["id"] for p in record["procedures"])
    assert frame["slot"].max() == len(record["slots"]) - 1


def test_importer_accepts_a_bare_entry_list(runs, tmp_path):
    doc = json.loads((runs[("rs", 0)] / ARCHIVE_FILE).read_text())
    bare = tmp_path / "bare.json"
    bare.write_text(json.dumps(doc["entries"]))
    imp = Importer.load_archive(bare)
    assert imp.entries == doc["entries"]
    assert imp.algorithm == "unknown"
    assert imp.metadata == {"source": str(bare)}


def test_comparison_report(runs, tmp_path):
    archives = [runs[k] / ARCHIVE_FILE for k in sorted(runs)]
    analysis = FrontComparisonAnalyzer(archives, tmp_path / "report")
    out = analysis.run_all()

    frame = out["results"]["runs"]
    assert list(frame["algorithm"]) == ["nsga3", "nsga3", "rs", "rs"]
    assert (frame["HV"] >= 0).all() and (frame["GD"] >= 0).all()
    comps = out["results"]["comparisons"]
    assert list(comps["metric"]) == ["HV", "GD", "SP"]
    assert set(comps.columns) >= {"metric", "p_value", "a12", "mean_a", "mean_b"}
    assert comps["a12"].between(0, 1).all()
    assert "Â12" in out["summary"]

    report = json.loads((tmp_path / "report" / "report.json").read_text())
    assert report["hv_reference_point"] == [1.1, 1.1, 1.1]
    assert len(report["runs"]) == 4
    assert len(pd.read_csv(tmp_path / "report" / "report_comparisons.csv")) == 3


def test_runs_against_themselves_give_a12_one_half(runs):
    archives = [runs[("nsga3", 0)], runs[("nsga3", 1)]] * 2
    analysis = FrontComparisonAnalyzer(archives, labels=["a", "a", "b", "b"])
    out = analysis.run_all()
    comps = out["results"]["comparisons"]
    assert list(comps["metric"]) == ["HV", "GD", "SP"]
    assert (comps["a12"] == 0.5).all()
    assert comps["p_value"].tolist() == pytest.approx([1.0, 1.0, 1.0])
    assert not comps["significant"].any()


def test_single_run_skips_statistics(runs):
    analysis = FrontComparisonAnalyzer([runs[("rs", 0)]])
    out = analysis.run_all()
    assert len(out["results"]["runs"]) == 1
    assert len(out["results"]["comparisons"]) == 0
    assert any("statistics skipped" in n for n in analysis.notices)


def test_empty_front_gets_worst_scores(runs, tmp_path):
    doc = json.loads((runs[("rs", 0)] / ARCHIVE_FILE).read_text())
    doc["entries"] = []
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps(doc))
    analysis = FrontComparisonAnalyzer([runs[("nsga3", 0)], empty], labels=["x", "y"])
    frame = analysis.run_all()["results"]["runs"]
    row = frame.iloc[1]
    assert row["front_size"] == 0
    assert row["HV"] == 0.0 and row["SP"] == 1.0
    assert row["GD"] == pytest.approx(3 ** 0.5)
    assert any("no feasible schedule" in n for n in analysis.notices)


def test_mixed_dimensionality_is_an_error(tmp_path):
    paths = []
    for name, point in (("three", [0.1, 0.2, 0.3]), ("two", [0.1, 0.2])):
        doc = {"algorithm": name, "entries": [{"fitness_minimized": point, "fitness_raw": {"violations": 0}}]}
        paths.append(tmp_path / f"{name}.json")
        paths[-1].write_text(json.dumps(doc))
    with pytest.raises(IndicatorError, match="dimensionalities"):
        FrontComparisonAnalyzer(paths).run_all()


def test_analyzer_argument_checks():
    with pytest.raises(ValueError):
        FrontComparisonAnalyzer([])
    with pytest.raises(ValueError, match="labels"):
        FrontComparisonAnalyzer(["archive.json"], labels=["a", "b"])


def test_controller_export(runs, tmp_path):
    written = CampaignController().export(runs[("nsga3", 0)] / ARCHIVE_FILE, tmp_path / "gantt", prefix="g")
    names = sorted(p.name for p in written)
    assert names[0] == "g_000.csv"
    assert all(p.exists() for p in written)
