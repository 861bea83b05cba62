import json
import subprocess
import sys

import numpy as np
import pytest

from acsl.cli import main


@pytest.fixture()
def dataset_dir(tmp_path):
    out = tmp_path / "data"
    code = main([
        "generate", "--clusters", "3", "--n-per-cluster", "15",
        "--views", "12:0.3:0.5,8:0.3:0.5", "--seed", "5",
        "--output-dir", str(out),
    ])
    assert code == 0
    return out


def test_generate_writes_dataset_and_manifest(dataset_dir):
    assert (dataset_dir / "manifest.json").exists()
    assert (dataset_dir / "view_0.csv").exists()
    assert (dataset_dir / "view_1.csv").exists()
    assert (dataset_dir / "labels.txt").exists()
    info = json.loads((dataset_dir / "informative_dims.json").read_text())
    assert len(info["per_view"]) == 2
    assert len(info["per_view"][0]) == 6
    assert len(info["stacked"]) == 10


def test_fit_writes_outputs_and_reports_convergence(dataset_dir, tmp_path):
    out = tmp_path / "fit"
    code = main([
        "fit", str(dataset_dir / "manifest.json"),
        "--clusters", "3", "--k-neighbors", "8", "--max-outer-iters", "10",
        "--output-dir", str(out),
    ])
    assert code in (0, 4)
    assert (out / "trace.csv").exists()
    assert (out / "ranking.csv").exists()
    summary = json.loads((out / "fit.json").read_text())
    assert (code == 0) == summary["converged"]
    ranking_lines = (out / "ranking.csv").read_text().splitlines()
    assert ranking_lines[0] == "dimension,view,score"
    assert len(ranking_lines) == 21  # header + 20 dimensions


def test_evaluate_writes_results(dataset_dir, tmp_path):
    out = tmp_path / "eval"
    code = main([
        "evaluate", str(dataset_dir / "manifest.json"),
        "--clusters", "3", "--k-neighbors", "8", "--max-outer-iters", "10",
        "--l-grid", "6", "--eval-seeds", "0,1", "--kmeans-restarts", "5",
        "--output-dir", str(out),
    ])
    assert code in (0, 4)
    payload = json.loads((out / "results.json").read_text())
    assert payload["selections"][0]["l"] == 6
    assert payload["selections"][0]["acc_mean"] is not None


def test_trace_verb_writes_csv(dataset_dir, tmp_path):
    target = tmp_path / "out" / "trace.csv"
    code = main([
        "trace", str(dataset_dir / "manifest.json"),
        "--clusters", "3", "--k-neighbors", "8", "--max-outer-iters", "5",
        "--out", str(target),
    ])
    assert code in (0, 4)
    lines = target.read_text().splitlines()
    assert lines[0] == "iteration,objective,components,alpha"
    assert len(lines) >= 2


def test_grid_verb_runs_small_sweep(dataset_dir, tmp_path):
    out = tmp_path / "grid"
    code = main([
        "grid", str(dataset_dir / "manifest.json"),
        "--clusters", "3", "--k-neighbors", "8", "--max-outer-iters", "4",
        "--l-grid", "6", "--eval-seeds", "0", "--kmeans-restarts", "3",
        "--grid-values", "0.1,10", "--jobs", "1",
        "--output-dir", str(out),
    ])
    assert code == 0
    summary = json.loads((out / "grid_summary.json").read_text())
    assert len(summary["points"]) == 8


def test_missing_manifest_exits_2(tmp_path):
    code = main([
        "fit", str(tmp_path / "nope.json"), "--clusters", "3",
        "--output-dir", str(tmp_path / "o"),
    ])
    assert code == 2


def test_invalid_hyperparameter_exits_2(dataset_dir, tmp_path):
    code = main([
        "fit", str(dataset_dir / "manifest.json"),
        "--clusters", "3", "--alpha", "-1.0",
        "--output-dir", str(tmp_path / "o"),
    ])
    assert code == 2


def test_k_neighbors_too_large_exits_2(dataset_dir, tmp_path):
    code = main([
        "fit", str(dataset_dir / "manifest.json"),
        "--clusters", "3", "--k-neighbors", "100",
        "--output-dir", str(tmp_path / "o"),
    ])
    assert code == 2


def test_output_dir_env_override(dataset_dir, tmp_path, monkeypatch):
    target = tmp_path / "env_out"
    monkeypatch.setenv("ACSL_OUTPUT_DIR", str(target))
    code = main([
        "fit", str(dataset_dir / "manifest.json"),
        "--clusters", "3", "--k-neighbors", "8", "--max-outer-iters", "3",
    ])
    assert code in (0, 4)
    assert (target / "trace.csv").exists()


def test_numeric_failure_exits_3(dataset_dir, tmp_path, monkeypatch):
    import acsl.cli as cli_module
    from acsl.errors import NumericError

    def boom(args):
        raise NumericError("synthetic failure")

    monkeypatch.setattr(cli_module, "_fit_state", boom)
    code = main([
        "fit", str(dataset_dir / "manifest.json"), "--clusters", "3",
        "--output-dir", str(tmp_path / "o"),
    ])
    assert code == 3


def test_console_entry_point_runs(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "acsl.cli", "generate",
         "--clusters", "2", "--n-per-cluster", "5", "--views", "6:0.5:0.5",
         "--seed", "1", "--output-dir", str(tmp_path / "d")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "wrote" in proc.stdout


def test_cli_determinism_across_processes(dataset_dir, tmp_path):
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        code = main([
            "evaluate", str(dataset_dir / "manifest.json"),
            "--clusters", "3", "--k-neighbors", "8", "--max-outer-iters", "6",
            "--l-grid", "6", "--eval-seeds", "0,1", "--kmeans-restarts", "3",
            "--output-dir", str(out),
        ])
        assert code in (0, 4)
        outs.append(out)
    assert (outs[0] / "results.json").read_bytes() == (outs[1] / "results.json").read_bytes()
    assert (outs[0] / "trace.csv").read_bytes() == (outs[1] / "trace.csv").read_bytes()
