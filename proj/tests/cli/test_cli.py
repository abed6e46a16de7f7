"""End-to-end checks of the mcfsel CLI: output format and exit codes."""

import json
import os
import subprocess

import pytest

MCFSEL = os.environ["MCFSEL_BIN"]

T1 = "p min 2 1\nn 1 5\nn 2 -5\na 1 2 0 10 3\n"
T2 = "p min 3 3\nn 1 5\nn 3 -5\na 1 2 0 4 1\na 1 3 0 10 5\na 2 3 0 4 1\n"
T3 = "p min 2 1\nn 1 5\nn 2 -5\na 1 2 0 3 3\n"


def run(*args, expect=0):
    result = subprocess.run([MCFSEL, *args], capture_output=True, text=True)
    assert result.returncode == expect, (
        f"{args}: exit {result.returncode}, stdout={result.stdout!r}, "
        f"stderr={result.stderr!r}"
    )
    return result.stdout


@pytest.fixture()
def instances(tmp_path):
    paths = {}
    for name, text in [("t1", T1), ("t2", T2), ("t3", T3)]:
        path = tmp_path / f"{name}.min"
        path.write_text(text)
        paths[name] = str(path)
    return paths


def test_solve_single_algorithm(instances):
    out = run("solve", instances["t1"], "--algorithm", "NS")
    assert out == "status=Optimal cost=15\n"


def test_solve_all_seven_rows(instances):
    out = run("solve", instances["t2"], "--algorithm", "all")
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 7
    assert all("cost=13" in line for line in lines)

    out = run("solve", instances["t3"])
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 7
    assert all("status=Infeasible" in line for line in lines)


def test_solve_certify(instances):
    out = run("solve", instances["t2"], "--algorithm", "NS", "--certify")
    assert "certified=true" in out


def test_parse_error_is_user_error(tmp_path, instances):
    bad = tmp_path / "bad.min"
    bad.write_text("p min 2 1\na 1 2 5 10 3\n")  # nonzero lower bound
    run("solve", str(bad), expect=1)
    run("solve", str(tmp_path / "missing.min"), expect=1)
    run("solve", instances["t1"], "--algorithm", "nosuch", expect=1)


def test_time_subcommand(instances):
    out = run("time", instances["t1"], "--algorithm", "SSP", "--repetitions", "2")
    assert "algorithm=SSP" in out
    assert "status=Optimal" in out
    assert "cost=15" in out


def test_featurize_stdout(instances):
    out = run("featurize", instances["t2"])
    header, row = [l for l in out.splitlines() if l]
    assert header.startswith("id,num_vertices,num_arcs,")
    assert len(row.split(",")) == 22


def test_predict_with_trained_model(tmp_path, instances):
    # one-point training set: every prediction is its label
    import sys

    feats = run("featurize", instances["t2"])
    values = feats.splitlines()[1].split(",")[1:]
    model = {
        "format": "mcfsel-model",
        "version": 1,
        "family": "knn",
        "hyperparameters": {"neighbors": "1", "weights": "uniform"},
        "feature_names": feats.splitlines()[0].split(",")[1:],
        "seed": 0,
        "dataset_hash": 0,
        "knn": {
            "neighbors": 1,
            "distance_weighted": False,
            "scaler_mean": [0.0] * 21,
            "scaler_std": [1.0] * 21,
            "labels": [5],
            "points": [[float(v) for v in values]],
        },
    }
    path = tmp_path / "constant_ns.json"
    path.write_text(json.dumps(model))
    out = run("predict", instances["t1"], "--model", str(path))
    assert out == "NS\n"
    out = run("predict", instances["t1"], "--model", str(path), "--run")
    assert out == "NS\nstatus=Optimal cost=15\n"

    corrupted = tmp_path / "corrupt.json"
    corrupted.write_text("{not json")
    run("predict", instances["t1"], "--model", str(corrupted), expect=1)
    del sys


def test_run_pipeline_and_no_clobber(tmp_path, instances):
    out_dir = tmp_path / "exp"
    config = {
        "output_dir": str(out_dir),
        "seed": 3,
        "repetitions": 1,
        "timeout": {"floor_ms": 5000, "ns_multiplier": 100},
        "test_fraction": 0.25,
        "cv_folds": 3,
        "families": ["decision_tree"],
        "generators": [
            {
                "family": "netgen",
                "replicates": 2,
                "num_vertices": [12, 16],
                "arc_rules": ["8n"],
                "supply_factors": [1, 10],
                "supply_vertex_rules": ["1"],
                "max_costs": [10, 100],
                "max_capacities": [100],
            },
            {
                "family": "gridgraph",
                "replicates": 2,
                "widths": [3, 4],
                "lengths": [3, 4],
                "supply_factors": [1, 10],
                "max_costs": [10, 100],
                "max_capacities": [100],
            },
        ],
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))

    out = run("run", str(config_path))
    assert "report=" in out
    assert "family=baseline_single_best" in out
    assert "family=decision_tree" in out
    for name in [
        "timings.csv",
        "labels.csv",
        "features.csv",
        "split.csv",
        "training_report.csv",
        "model_decision_tree.json",
        "report.csv",
        "corpus/manifest.tsv",
    ]:
        assert (out_dir / name).exists(), name

    # rerunning over the non-empty directory without force is a user error
    run("run", str(config_path), expect=1)

    # report subcommand consumes the labels file
    out = run("report", "--labels", str(out_dir / "labels.csv"))
    assert out.startswith("algorithm,")

    # missing output_dir in the config is a user error
    bad = dict(config)
    del bad["output_dir"]
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(bad))
    run("run", str(bad_path), expect=1)


def test_stage_subcommands_compose(tmp_path, instances):
    # generate -> featurize -> (synthetic timings) -> label -> split
    corpus = tmp_path / "corpus"
    config = {
        "output_dir": "unused",
        "generators": [
            {
                "family": "gridgraph",
                "replicates": 2,
                "widths": [3],
                "lengths": [3],
                "supply_factors": [1],
                "max_costs": [10],
                "max_capacities": [100],
            }
        ],
    }
    config_path = tmp_path / "gen.json"
    config_path.write_text(json.dumps(config))
    out = run("generate", str(config_path), "--out", str(corpus), "--seed", "5")
    assert "instances=2" in out

    features_csv = tmp_path / "features.csv"
    run("featurize", "--corpus", str(corpus), "--out", str(features_csv))
    assert features_csv.read_text().count("\n") == 3  # header + 2 rows

    ids = [line.split(",")[0] for line in features_csv.read_text().splitlines()[1:]]
    timings = tmp_path / "timings.csv"
    rows = ["instance_id,algorithm,status,median_ns,cost,repetitions"]
    for instance_id in ids:
        for code, name in enumerate(["SCC", "MMCC", "CAT", "SSP", "CAS", "NS", "CS2"]):
            rows.append(f"{instance_id},{name},Optimal,{1000 + code},42,3")
    timings.write_text("\n".join(rows) + "\n")

    labels_csv = tmp_path / "labels.csv"
    out = run(
        "label",
        "--timings", str(timings),
        "--corpus", str(corpus),
        "--out", str(labels_csv),
    )
    assert "labeled=2" in out
    body = labels_csv.read_text()
    assert "SCC" in body  # lowest median wins
    assert "gridgraph" in body

    split_csv = tmp_path / "split.csv"
    run(
        "split",
        "--features", str(features_csv),
        "--test-fraction", "0.5",
        "--seed", "1",
        "--out", str(split_csv),
    )
    roles = [line.split(",")[1] for line in split_csv.read_text().splitlines()[1:]]
    assert sorted(roles) == ["test", "train"]


def test_train_and_evaluate_subcommands(tmp_path):
    corpus = tmp_path / "corpus"
    config = {
        "output_dir": "unused",
        "generators": [
            {
                "family": "netgen",
                "replicates": 4,
                "num_vertices": [10, 14],
                "arc_rules": ["8n"],
                "supply_factors": [1, 10],
                "supply_vertex_rules": ["1"],
                "max_costs": [10],
                "max_capacities": [100],
            }
        ],
    }
    config_path = tmp_path / "gen.json"
    config_path.write_text(json.dumps(config))
    run("generate", str(config_path), "--out", str(corpus), "--seed", "9")

    features_csv = tmp_path / "features.csv"
    run("featurize", "--corpus", str(corpus), "--out", str(features_csv))
    ids = [line.split(",")[0] for line in features_csv.read_text().splitlines()[1:]]
    assert len(ids) == 16

    # synthetic timings: small instances favor SSP, larger favor NS
    timings = tmp_path / "timings.csv"
    rows = ["instance_id,algorithm,status,median_ns,cost,repetitions"]
    for i, instance_id in enumerate(sorted(ids)):
        fast = "SSP" if i % 2 == 0 else "NS"
        for name in ["SCC", "MMCC", "CAT", "SSP", "CAS", "NS", "CS2"]:
            median = 500 if name == fast else 2000
            rows.append(f"{instance_id},{name},Optimal,{median},7,3")
    timings.write_text("\n".join(rows) + "\n")

    labels_csv = tmp_path / "labels.csv"
    run("label", "--timings", str(timings), "--corpus", str(corpus),
        "--out", str(labels_csv))

    split_csv = tmp_path / "split.csv"
    run("split", "--features", str(features_csv), "--test-fraction", "0.25",
        "--seed", "2", "--out", str(split_csv))

    model_path = tmp_path / "model.json"
    report_path = tmp_path / "cv.csv"
    out = run(
        "train",
        "--features", str(features_csv),
        "--labels", str(labels_csv),
        "--split", str(split_csv),
        "--family", "decision_tree",
        "--folds", "3",
        "--seed", "4",
        "--out", str(model_path),
        "--report", str(report_path),
    )
    assert "family=decision_tree" in out
    assert model_path.exists()
    assert report_path.read_text().startswith("family,cell,")

    out = run(
        "evaluate",
        "--model", str(model_path),
        "--features", str(features_csv),
        "--labels", str(labels_csv),
        "--split", str(split_csv),
    )
    assert out.startswith("family,hyperparameters,accuracy,baseline_accuracy")
    assert "baseline_single_best" in out
