import csv
import hashlib
import json
import random

import pytest

from disclosure_ensemble import LABELS
from disclosure_ensemble.cli import EXIT_DATA, EXIT_PARSE, EXIT_USAGE, main
from disclosure_ensemble.ensemble import PredictionMatrix, format_predictions
from disclosure_ensemble.synthetic import data_path

FIXTURE = str(data_path("fixture_20.csv"))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_stats_matches_frozen_fixture(tmp_path):
    assert main(["stats", FIXTURE, "--out", str(tmp_path)]) == 0
    expected = json.loads(data_path("fixture_20.expected.json").read_text())
    rows = {r["statistic"]: r for r in read_csv(tmp_path / "summary.csv")}
    assert int(rows["n_comments"]["mean_or_count"]) == expected["n_comments"]
    assert int(rows["n_parents"]["mean_or_count"]) == expected["n_parents"]
    for name in ("comments_per_parent", "words_per_comment", "impact"):
        assert float(rows[name]["mean_or_count"]) == pytest.approx(expected[name]["mean"], abs=1e-12)
        assert float(rows[name]["std"]) == pytest.approx(expected[name]["std"], abs=1e-12)
    labels = {r["label"]: float(r["positive_rate"]) for r in read_csv(tmp_path / "labels.csv")}
    assert labels == pytest.approx(expected["label_rates"], abs=1e-12)
    weekday = {r["weekday"]: r for r in read_csv(tmp_path / "weekday.csv")}
    assert "Overall" in weekday
    for day, row in expected["weekday"].items():
        for label in LABELS:
            assert float(weekday[day][label]) * 100 == pytest.approx(row[label], abs=1e-9)


def test_stats_markdown_renders_percent(tmp_path):
    assert main(["stats", FIXTURE, "--out", str(tmp_path), "--format", "markdown"]) == 0
    text = (tmp_path / "weekday.md").read_text()
    assert text.startswith("| weekday |") and "%" in text


def test_manifest_digests_match_inputs(tmp_path):
    assert main(["stats", FIXTURE, "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "stats"
    digest = hashlib.sha256(data_path("fixture_20.csv").read_bytes()).hexdigest()
    assert manifest["inputs"] == {FIXTURE: digest}
    for name, sha in manifest["outputs"].items():
        assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == sha


def agreeing_predictions(tmp_path):
    rng = random.Random(0)
    rows = {f"c{i}": tuple(rng.random() for _ in LABELS) for i in range(15)}
    path = tmp_path / "preds.jsonl"
    path.write_text(format_predictions(PredictionMatrix({"roberta": rows, "albert": dict(rows)})))
    return path


def test_ensemble_model2_with_agreeing_models(tmp_path):
    preds = agreeing_predictions(tmp_path)
    out = tmp_path / "out"
    args = ["ensemble", str(preds), "--models", "roberta,albert", "--out", str(out)]
    assert main(args + ["--config", "Model 2", "--config", "A", "--config", "B"]) == 0
    model2 = (out / "runs" / "model2.csv").read_text()
    assert model2 == (out / "runs" / "a.csv").read_text() == (out / "runs" / "b.csv").read_text()


def test_ensemble_all_runs(tmp_path):
    preds = agreeing_predictions(tmp_path)
    out = tmp_path / "out"
    assert main(["ensemble", str(preds), "--models", "roberta,albert", "--all-runs", "--out", str(out)]) == 0
    assert sorted(p.name for p in (out / "runs").iterdir()) == [f"run{i}.csv" for i in range(1, 8)]


def test_usage_parse_and_data_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "o")
    assert main(["evaluate", "--corpus", FIXTURE, "-k", "21", "--out", out]) == EXIT_USAGE
    bad = tmp_path / "bad.csv"
    bad.write_text("id,parent_id,author,created_utc,score,text\na,p,u,zero,1,x\n")
    assert main(["stats", str(bad), "--out", out]) == EXIT_PARSE
    assert f"{bad}:2:" in capsys.readouterr().err
    dup = tmp_path / "dup.csv"
    dup.write_text("id,parent_id,author,created_utc,score,text\na,p,u,0,1,x\na,p,u,0,1,y\n")
    assert main(["stats", str(dup), "--out", out]) == EXIT_DATA
    assert main(["stats", str(tmp_path / "missing.csv"), "--out", out]) == EXIT_PARSE
    assert len({EXIT_USAGE, EXIT_PARSE, EXIT_DATA, 0}) == 4


def test_unknown_config_is_usage_error(tmp_path):
    preds = agreeing_predictions(tmp_path)
    code = main(["ensemble", str(preds), "--models", "roberta,albert", "--config", "Model 9", "--out", str(tmp_path)])
    assert code == EXIT_USAGE


def test_gridsearch_and_evaluate_predictions(tmp_path):
    out = tmp_path / "train"
    assert main(["train", FIXTURE, "--out", str(out), "--seed", "1", "--epochs", "2"]) == 0
    assert len(list((out / "models").iterdir())) == 12
    grid = tmp_path / "grid"
    assert main(["gridsearch", str(out / "predictions.jsonl"), "--gold", FIXTURE, "--step", "0.5", "--out", str(grid)]) == 0
    assert len(read_csv(grid / "grid.csv")) == 3 * len(LABELS)
    best = json.loads((grid / "best_config.json").read_text())
    assert set(best["weights"]) == set(LABELS)
    ev = tmp_path / "eval"
    args = ["evaluate", "--predictions", str(out / "predictions.jsonl"), "--gold", FIXTURE, "-k", "4", "--seed", "3"]
    assert main(args + ["--config-file", str(grid / "best_config.json"), "--out", str(ev), "--format", "json"]) == 0
    report = json.loads((ev / "report.json").read_text())
    assert report["k"] == 4 and report["seed"] == 3 and len(report["configs"]["grid"]["folds"]) == 4
    table = json.loads((ev / "comparison.json").read_text())
    assert [r["model"] for r in table] == ["grid"]


def test_features_with_resource_file_and_polarity(tmp_path):
    conf = tmp_path / "resources.conf"
    conf.write_text(f"# bundled resources\nwordnet = {data_path('wordnet')}\npositive={data_path('positive-words.txt')}\n")
    pol = tmp_path / "pol.csv"
    pol.write_text("id,probability\nc0000,0.75\n")
    out = tmp_path / "f"
    assert main(["features", FIXTURE, "--resources", str(conf), "--polarity", str(pol), "--out", str(out)]) == 0
    rows = {r["id"]: r for r in read_csv(out / "features.csv")}
    assert len(rows) == 20 and float(rows["c0000"]["positive_polarity_confidence"]) == 0.75
    corr = tmp_path / "c"
    assert main(["correlate", FIXTURE, "--features", str(out / "features.csv"), "--out", str(corr)]) == 0
    table = read_csv(corr / "feature_correlation.csv")
    assert [r["variable"] for r in table][:2] == ["positive_words", "negative_words"]
    assert all(r["rho"] == "" or len(r["rho"].split(".")[1]) == 4 for r in table)


def test_rerun_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["train", FIXTURE, "--out", str(tmp_path / name), "--seed", "9", "--epochs", "1"]) == 0
    a, b = tmp_path / "a", tmp_path / "b"
    assert (a / "predictions.jsonl").read_bytes() == (b / "predictions.jsonl").read_bytes()
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["outputs"] == mb["outputs"] and ma["inputs"] == mb["inputs"]
