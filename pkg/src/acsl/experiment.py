"""Experiment orchestration: load a manifest, fit the solver, rank and
select features, evaluate selections by clustering, and emit result files.

Every emitted file is a deterministic function of (manifest bytes, config,
seeds): JSON is written with sorted keys and no timestamps, numeric text
uses a fixed 17-significant-digit float format.
"""

from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, replace
import itertools
import json
from pathlib import Path

import numpy as np

from .data import (
    FLOAT_FORMAT,
    DatasetManifest,
    MultiViewDataset,
    load_dataset,
    load_labels,
)
from .errors import ConfigError, NumericError
from .evaluation import EvalReport, score_clustering
from .graph import build_view_affinity, connected_components
from .selection import rank_features, select_top
from .solver import Hyperparams, SolverState, fit

RESULTS_SCHEMA_VERSION = 1

# Decade grid matching the usual hyperparameter sweep range.
DEFAULT_GRID = tuple(10.0 ** e for e in range(-4, 5))


@dataclass(frozen=True)
class RunConfig:
    """Everything an experiment run needs besides the dataset itself."""

    hyperparams: Hyperparams
    k_neighbors: int = 10
    l_grid: tuple[int, ...] | None = None  # None selects all d dimensions
    kmeans_restarts: int = 50
    eval_seeds: tuple[int, ...] = tuple(range(10))
    output_dir: str = "results"

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ConfigError(f"k_neighbors must be positive, got {self.k_neighbors}")
        if self.kmeans_restarts < 1:
            raise ConfigError(
                f"kmeans_restarts must be positive, got {self.kmeans_restarts}"
            )
        if not self.eval_seeds:
            raise ConfigError("at least one evaluation seed is required")
        if self.l_grid is not None and any(l < 1 for l in self.l_grid):
            raise ConfigError(f"l_grid entries must be positive, got {self.l_grid}")


@contextmanager
def _stage(name: str):
    """Re-raise package errors with the failing stage prepended."""
    try:
        yield
    except (ConfigError, NumericError) as exc:
        raise type(exc)(f"{name}: {exc}") from exc


def emit_trace(state: SolverState, path: str | Path) -> None:
    """Write the convergence trace as CSV (iteration, objective,
    components, alpha), one row per recorded outer iteration including the
    initial state."""
    lines = ["iteration,objective,components,alpha"]
    rows = zip(state.objective_trace, state.components_trace, state.alpha_trace)
    for i, (obj, comps, alpha) in enumerate(rows):
        lines.append(f"{i},{FLOAT_FORMAT % obj},{comps},{FLOAT_FORMAT % alpha}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_graphs(dataset: MultiViewDataset, k_neighbors: int):
    graphs = []
    for i, view in enumerate(dataset.views):
        with _stage(f"building affinity graph for view {i}"):
            graphs.append(build_view_affinity(view, k_neighbors, view_id=str(i)))
    return graphs


def _solver_diagnostics(state: SolverState) -> dict:
    s = state.s.matrix
    return {
        "negative_weight_fraction": float(np.mean(state.w < 0)),
        "s_diagonal_mass": float(np.trace(s) / s.shape[0]),
    }


def _hyperparams_dict(hp: Hyperparams) -> dict:
    return {
        "alpha": hp.alpha,
        "beta": hp.beta,
        "gamma": hp.gamma,
        "k": hp.k,
        "epsilon": hp.epsilon,
        "max_outer_iters": hp.max_outer_iters,
        "max_inner_iters": hp.max_inner_iters,
        "tol_rel_objective": hp.tol_rel_objective,
        "adaptive_alpha": hp.adaptive_alpha,
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def run_experiment(manifest: DatasetManifest, config: RunConfig) -> dict:
    """Full pipeline on one dataset; returns the results payload.

    Writes results.json, trace.csv, and selected_l{l}.txt under
    config.output_dir. Clustering metrics require labels in the manifest;
    without them the selections carry indices only.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    with _stage("loading dataset"):
        dataset = load_dataset(manifest)
        labels = load_labels(manifest)
    graphs = build_graphs(dataset, config.k_neighbors)
    x = dataset.stacked

    l_grid = config.l_grid if config.l_grid is not None else (dataset.d,)
    bad = [l for l in l_grid if l > dataset.d]
    if bad:
        raise ConfigError(f"l_grid entries {bad} exceed the {dataset.d} stacked dimensions")

    with _stage("fitting"):
        state = fit(graphs, x, config.hyperparams)
    emit_trace(state, out / "trace.csv")

    ranking = rank_features(state.p, view_of=dataset.view_of)
    comps = connected_components(state.s)

    selections = []
    for l in l_grid:
        indices = select_top(ranking, l)
        (out / f"selected_l{l}.txt").write_text(
            "\n".join(str(int(i)) for i in indices) + "\n", encoding="utf-8"
        )
        entry = {"l": int(l), "indices": [int(i) for i in indices]}
        if labels is not None:
            with _stage(f"evaluating selection l={l}"):
                accs, nmis = score_clustering(
                    x[:, indices],
                    labels,
                    config.hyperparams.k,
                    config.kmeans_restarts,
                    config.eval_seeds,
                )
            report = EvalReport(
                acc_mean=float(accs.mean()),
                acc_std=float(accs.std()),
                nmi_mean=float(nmis.mean()),
                nmi_std=float(nmis.std()),
                runs=len(config.eval_seeds),
                selected_count=int(l),
                objective_trace=[float(v) for v in state.objective_trace],
                components_final=comps,
            )
            entry.update(
                acc_mean=report.acc_mean,
                acc_std=report.acc_std,
                nmi_mean=report.nmi_mean,
                nmi_std=report.nmi_std,
                runs=report.runs,
            )
        else:
            entry.update(acc_mean=None, acc_std=None, nmi_mean=None, nmi_std=None,
                         runs=0)
        selections.append(entry)

    payload = {
        "schema_version": RESULTS_SCHEMA_VERSION,
        "dataset": dataset.name,
        "n": dataset.n,
        "d": dataset.d,
        "view_dims": dataset.dims,
        "hyperparams": _hyperparams_dict(config.hyperparams),
        "config": {
            "k_neighbors": config.k_neighbors,
            "l_grid": [int(l) for l in l_grid],
            "kmeans_restarts": config.kmeans_restarts,
            "eval_seeds": list(config.eval_seeds),
        },
        "converged": state.converged,
        "iterations": state.iteration,
        "final_objective": float(state.objective_trace[-1]),
        "components_final": comps,
        "diagnostics": _solver_diagnostics(state),
        "selections": selections,
    }
    _write_json(out / "results.json", payload)
    return payload


def _grid_point(args) -> dict:
    manifest, config, alpha, beta, gamma = args
    hp = replace(config.hyperparams, alpha=alpha, beta=beta, gamma=gamma)
    sub = Path(config.output_dir) / f"grid_a{alpha:g}_b{beta:g}_g{gamma:g}"
    point_config = replace(config, hyperparams=hp, output_dir=str(sub))
    payload = run_experiment(manifest, point_config)
    best_acc = max(
        (s["acc_mean"] for s in payload["selections"] if s["acc_mean"] is not None),
        default=None,
    )
    return {
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "best_acc_mean": best_acc,
        "converged": payload["converged"],
        "output_dir": sub.name,
    }


def run_grid(
    manifest: DatasetManifest,
    config: RunConfig,
    values: tuple[float, ...] = DEFAULT_GRID,
    jobs: int = 1,
) -> dict:
    """Sweep alpha, beta, gamma over `values`, one experiment per point.

    Points run in a process pool when jobs > 1; each writes to its own
    subdirectory. The summary reports every point and the best by mean
    clustering accuracy (ties keep the earliest point in grid order).
    """
    if load_labels(manifest) is None:
        raise ConfigError("grid mode needs labels to rank configurations by accuracy")
    combos = [
        (manifest, config, a, b, g)
        for a, b, g in itertools.product(values, values, values)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(_grid_point, combos))
    else:
        points = [_grid_point(c) for c in combos]

    best = max(
        (p for p in points if p["best_acc_mean"] is not None),
        key=lambda p: p["best_acc_mean"],
        default=None,
    )
    summary = {
        "schema_version": RESULTS_SCHEMA_VERSION,
        "grid_values": list(values),
        "points": points,
        "best": best,
    }
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "grid_summary.json", summary)
    return summary
