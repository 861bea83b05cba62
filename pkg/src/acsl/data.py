"""Multi-view dataset container, dataset manifests, and delimited-text I/O.

A dataset is a list of per-view feature matrices over the same samples. The
manifest is a small JSON file describing where each view lives on disk, how
to parse it, and whether to z-score it on load.
"""

from dataclasses import dataclass, field
from functools import cached_property
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError

# 17 significant digits round-trips IEEE doubles exactly.
FLOAT_FORMAT = "%.17g"

MANIFEST_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class MultiViewDataset:
    """Per-view feature matrices sharing a common sample axis.

    `informative_dims` carries the planted per-view informative column
    indices for synthetic data (None for loaded datasets).
    """

    views: list[np.ndarray]
    name: str = "dataset"
    informative_dims: list[np.ndarray] | None = None

    def __post_init__(self):
        if not self.views:
            raise ConfigError("a dataset needs at least one view")
        views = [np.asarray(v, dtype=float) for v in self.views]
        n = views[0].shape[0]
        for i, v in enumerate(views):
            if v.ndim != 2:
                raise ConfigError(f"view {i} must be a 2-d matrix, got shape {v.shape}")
            if v.shape[0] != n:
                raise ConfigError(
                    f"row-count mismatch: view {i} has {v.shape[0]} rows, view 0 has {n}"
                )
        object.__setattr__(self, "views", views)

    @property
    def n(self) -> int:
        return self.views[0].shape[0]

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def dims(self) -> list[int]:
        return [v.shape[1] for v in self.views]

    @property
    def d(self) -> int:
        return sum(self.dims)

    @cached_property
    def stacked(self) -> np.ndarray:
        """All views concatenated column-wise into one (n, d) matrix."""
        return np.hstack(self.views)

    @cached_property
    def view_of(self) -> np.ndarray:
        """View index of every stacked column."""
        return np.repeat(np.arange(self.n_views), self.dims)

    @cached_property
    def view_offsets(self) -> np.ndarray:
        """Starting stacked-column offset of each view."""
        return np.concatenate(([0], np.cumsum(self.dims)[:-1]))

    def stacked_informative_dims(self) -> np.ndarray | None:
        """Planted informative indices mapped into stacked-column space."""
        if self.informative_dims is None:
            return None
        parts = [
            idx + off for idx, off in zip(self.informative_dims, self.view_offsets)
        ]
        return np.concatenate(parts)


@dataclass(frozen=True)
class ViewSpec:
    """How to locate and parse one view's matrix file."""

    path: str
    delimiter: str = ","
    has_header: bool = False
    dims: int | None = None


@dataclass(frozen=True)
class DatasetManifest:
    """Description of an on-disk multi-view dataset.

    Paths are interpreted relative to `base_dir` (set when reading a
    manifest file). Labels are optional; the method is unsupervised and
    labels only serve evaluation.
    """

    name: str
    views: list[ViewSpec]
    labels_path: str | None = None
    n: int | None = None
    standardize: bool = True
    base_dir: str = "."

    def __post_init__(self):
        if not self.views:
            raise ConfigError(f"manifest '{self.name}' declares no views")

    def resolve(self, path: str) -> Path:
        return Path(self.base_dir) / path

    @classmethod
    def from_file(cls, path: str | Path) -> "DatasetManifest":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"manifest file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"manifest {path} is not valid JSON: {exc}")
        try:
            views = [ViewSpec(**v) for v in raw["views"]]
            return cls(
                name=raw.get("name", path.stem),
                views=views,
                labels_path=raw.get("labels_path"),
                n=raw.get("n"),
                standardize=raw.get("standardize", True),
                base_dir=str(path.parent),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"manifest {path} has an invalid field: {exc}")

    def to_dict(self) -> dict:
        return {
            "schema_version": MANIFEST_SCHEMA_VERSION,
            "name": self.name,
            "views": [
                {
                    "path": v.path,
                    "delimiter": v.delimiter,
                    "has_header": v.has_header,
                    "dims": v.dims,
                }
                for v in self.views
            ],
            "labels_path": self.labels_path,
            "n": self.n,
            "standardize": self.standardize,
        }

    def write(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )


def _parse_matrix(path: Path, delimiter: str, has_header: bool) -> np.ndarray:
    """Parse a delimited numeric text matrix with precise error locations."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise ConfigError(f"view file not found: {path}")
    start = 1 if has_header else 0
    rows: list[list[float]] = []
    width = None
    for r in range(start, len(lines)):
        line = lines[r]
        if not line.strip():
            continue
        cells = line.split() if delimiter.strip() == "" else line.split(delimiter)
        values = []
        for c, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError:
                raise ConfigError(
                    f"{path}: non-numeric value {cell.strip()!r} at row {r + 1}, column {c + 1}"
                )
            if not np.isfinite(value):
                raise ConfigError(
                    f"{path}: non-finite value {cell.strip()!r} at row {r + 1}, column {c + 1}"
                )
            values.append(value)
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ConfigError(
                f"{path}: row {r + 1} has {len(values)} columns, expected {width}"
            )
        rows.append(values)
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    return np.array(rows)


def zscore_columns(a: np.ndarray) -> np.ndarray:
    """Center and scale each column to unit variance; constant columns are
    centered only."""
    mu = a.mean(axis=0)
    sd = a.std(axis=0)
    sd = np.where(sd == 0, 1.0, sd)
    return (a - mu) / sd


def load_dataset(manifest: DatasetManifest) -> MultiViewDataset:
    """Load every view declared in the manifest into a MultiViewDataset.

    Validates declared dimensions and sample counts, and applies per-view
    z-score standardization when the manifest asks for it (the default).
    """
    mats = []
    for spec in manifest.views:
        m = _parse_matrix(manifest.resolve(spec.path), spec.delimiter, spec.has_header)
        if spec.dims is not None and m.shape[1] != spec.dims:
            raise ConfigError(
                f"view '{spec.path}' has {m.shape[1]} columns, manifest declares {spec.dims}"
            )
        mats.append(m)
    counts = {spec.path: m.shape[0] for spec, m in zip(manifest.views, mats)}
    if len(set(counts.values())) > 1:
        detail = ", ".join(f"'{p}': {c} rows" for p, c in counts.items())
        raise ConfigError(f"views disagree on sample count ({detail})")
    if manifest.n is not None and mats[0].shape[0] != manifest.n:
        raise ConfigError(
            f"dataset has {mats[0].shape[0]} samples, manifest declares {manifest.n}"
        )
    if manifest.standardize:
        mats = [zscore_columns(m) for m in mats]
    return MultiViewDataset(views=mats, name=manifest.name)


def load_labels(manifest: DatasetManifest) -> np.ndarray | None:
    """Integer labels (one per line) if the manifest declares them."""
    if manifest.labels_path is None:
        return None
    path = manifest.resolve(manifest.labels_path)
    try:
        lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    except FileNotFoundError:
        raise ConfigError(f"labels file not found: {path}")
    try:
        labels = np.array([int(ln) for ln in lines])
    except ValueError as exc:
        raise ConfigError(f"{path}: labels must be integers ({exc})")
    if manifest.n is not None and labels.size != manifest.n:
        raise ConfigError(
            f"{path}: {labels.size} labels for {manifest.n} declared samples"
        )
    return labels


def write_matrix(path: str | Path, a: np.ndarray, delimiter: str = ",") -> None:
    np.savetxt(path, a, fmt=FLOAT_FORMAT, delimiter=delimiter)


def save_dataset(
    dataset: MultiViewDataset,
    out_dir: str | Path,
    labels: np.ndarray | None = None,
    delimiter: str = ",",
    standardize: bool = True,
) -> Path:
    """Write a dataset as per-view text matrices plus a manifest.

    Returns the manifest path. The raw matrices are written verbatim;
    `standardize` only records whether loaders should z-score them.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    specs = []
    for i, m in enumerate(dataset.views):
        fname = f"view_{i}.csv"
        write_matrix(out / fname, m, delimiter=delimiter)
        specs.append(ViewSpec(path=fname, delimiter=delimiter, dims=m.shape[1]))
    labels_path = None
    if labels is not None:
        labels_path = "labels.txt"
        (out / labels_path).write_text(
            "\n".join(str(int(v)) for v in labels) + "\n", encoding="utf-8"
        )
    manifest = DatasetManifest(
        name=dataset.name,
        views=specs,
        labels_path=labels_path,
        n=dataset.n,
        standardize=standardize,
        base_dir=str(out),
    )
    manifest_path = out / "manifest.json"
    manifest.write(manifest_path)
    return manifest_path
