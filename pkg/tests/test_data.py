import numpy as np
import pytest

from acsl.data import (
    DatasetManifest,
    MultiViewDataset,
    ViewSpec,
    load_dataset,
    load_labels,
    save_dataset,
    zscore_columns,
)
from acsl.errors import ConfigError
from acsl.synthetic import generate_synthetic


def write_csv(path, rows):
    path.write_text("\n".join(",".join(str(v) for v in row) for row in rows) + "\n")


def toy_manifest(tmp_path, standardize=False):
    write_csv(tmp_path / "a.csv", [[1, 2], [3, 4], [5, 6], [7, 8]])
    write_csv(tmp_path / "b.csv", [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]])
    return DatasetManifest(
        name="toy",
        views=[ViewSpec(path="a.csv", dims=2), ViewSpec(path="b.csv", dims=3)],
        n=4,
        standardize=standardize,
        base_dir=str(tmp_path),
    )


def test_two_view_stacking_arithmetic(tmp_path):
    ds = load_dataset(toy_manifest(tmp_path))
    assert ds.stacked.shape == (4, 5)
    assert np.array_equal(ds.view_of, [0, 0, 1, 1, 1])
    assert np.array_equal(ds.view_offsets, [0, 2])
    assert np.array_equal(ds.stacked[:, :2], [[1, 2], [3, 4], [5, 6], [7, 8]])


def test_row_count_mismatch_names_both_views(tmp_path):
    write_csv(tmp_path / "a.csv", [[1, 2], [3, 4]])
    write_csv(tmp_path / "b.csv", [[1], [2], [3]])
    manifest = DatasetManifest(
        name="bad",
        views=[ViewSpec(path="a.csv"), ViewSpec(path="b.csv")],
        base_dir=str(tmp_path),
    )
    with pytest.raises(ConfigError) as exc:
        load_dataset(manifest)
    assert "a.csv" in str(exc.value) and "b.csv" in str(exc.value)


def test_non_numeric_cell_reports_row_and_column(tmp_path):
    (tmp_path / "a.csv").write_text("1,2\n3,oops\n")
    manifest = DatasetManifest(
        name="bad", views=[ViewSpec(path="a.csv")], base_dir=str(tmp_path)
    )
    with pytest.raises(ConfigError) as exc:
        load_dataset(manifest)
    msg = str(exc.value)
    assert "row 2" in msg and "column 2" in msg and "oops" in msg


def test_non_finite_cell_rejected(tmp_path):
    (tmp_path / "a.csv").write_text("1,2\n3,inf\n")
    manifest = DatasetManifest(
        name="bad", views=[ViewSpec(path="a.csv")], base_dir=str(tmp_path)
    )
    with pytest.raises(ConfigError):
        load_dataset(manifest)


def test_declared_dimension_mismatch(tmp_path):
    write_csv(tmp_path / "a.csv", [[1, 2], [3, 4]])
    manifest = DatasetManifest(
        name="bad", views=[ViewSpec(path="a.csv", dims=3)], base_dir=str(tmp_path)
    )
    with pytest.raises(ConfigError) as exc:
        load_dataset(manifest)
    assert "declares 3" in str(exc.value)


def test_declared_sample_count_mismatch(tmp_path):
    write_csv(tmp_path / "a.csv", [[1], [2]])
    manifest = DatasetManifest(
        name="bad", views=[ViewSpec(path="a.csv")], n=5, base_dir=str(tmp_path)
    )
    with pytest.raises(ConfigError):
        load_dataset(manifest)


def test_missing_view_file(tmp_path):
    manifest = DatasetManifest(
        name="bad", views=[ViewSpec(path="nope.csv")], base_dir=str(tmp_path)
    )
    with pytest.raises(ConfigError):
        load_dataset(manifest)


def test_whitespace_delimiter(tmp_path):
    (tmp_path / "a.txt").write_text("1  2\n3 4\n")
    manifest = DatasetManifest(
        name="ws",
        views=[ViewSpec(path="a.txt", delimiter=" ")],
        standardize=False,
        base_dir=str(tmp_path),
    )
    ds = load_dataset(manifest)
    assert np.array_equal(ds.views[0], [[1, 2], [3, 4]])


def test_header_rows_are_skipped(tmp_path):
    (tmp_path / "a.csv").write_text("x,y\n1,2\n3,4\n")
    manifest = DatasetManifest(
        name="hdr",
        views=[ViewSpec(path="a.csv", has_header=True)],
        standardize=False,
        base_dir=str(tmp_path),
    )
    assert np.array_equal(load_dataset(manifest).views[0], [[1, 2], [3, 4]])


def test_labels_roundtrip(tmp_path):
    manifest = toy_manifest(tmp_path)
    assert load_labels(manifest) is None
    (tmp_path / "labels.txt").write_text("0\n1\n1\n0\n")
    manifest2 = DatasetManifest(
        name="toy", views=manifest.views, labels_path="labels.txt",
        n=4, base_dir=str(tmp_path),
    )
    assert np.array_equal(load_labels(manifest2), [0, 1, 1, 0])


def test_labels_length_checked(tmp_path):
    manifest = toy_manifest(tmp_path)
    (tmp_path / "labels.txt").write_text("0\n1\n")
    bad = DatasetManifest(
        name="toy", views=manifest.views, labels_path="labels.txt",
        n=4, base_dir=str(tmp_path),
    )
    with pytest.raises(ConfigError):
        load_labels(bad)


def test_zscore_standardization_applied(tmp_path):
    ds = load_dataset(toy_manifest(tmp_path, standardize=True))
    for view in ds.views:
        assert np.allclose(view.mean(axis=0), 0.0, atol=1e-12)
        live = view.std(axis=0) > 0
        assert np.allclose(view.std(axis=0)[live], 1.0, atol=1e-12)


def test_zscore_leaves_constant_columns_centered():
    a = np.array([[1.0, 5.0], [1.0, 7.0]])
    z = zscore_columns(a)
    assert np.allclose(z[:, 0], 0.0)
    assert np.allclose(z[:, 1], [-1.0, 1.0])


def test_written_dataset_roundtrips_exactly(tmp_path):
    ds, labels = generate_synthetic(6, 2, [(7, 0.4, 0.5), (3, 0.2, 1.0)], seed=11)
    manifest_path = save_dataset(ds, tmp_path / "out", labels=labels, standardize=False)
    reloaded = load_dataset(DatasetManifest.from_file(manifest_path))
    for orig, back in zip(ds.views, reloaded.views):
        assert np.abs(orig - back).max() <= 1e-12
    assert np.array_equal(load_labels(DatasetManifest.from_file(manifest_path)), labels)


def test_manifest_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        DatasetManifest.from_file(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        DatasetManifest.from_file(bad)
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    with pytest.raises(ConfigError):
        DatasetManifest.from_file(empty)


def test_dataset_requires_consistent_rows():
    with pytest.raises(ConfigError):
        MultiViewDataset(views=[np.zeros((3, 2)), np.zeros((4, 2))])
    with pytest.raises(ConfigError):
        MultiViewDataset(views=[])
