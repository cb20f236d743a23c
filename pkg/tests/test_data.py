import json

import numpy as np
import pytest

from dradapt.data import (Dataset, SyntheticSpec, generate_synthetic,
                          load_dataset, load_manifest, standardize, subsample,
                          synthetic_corpus, write_dataset)
from dradapt.errors import ParseError, ValidationError


def _write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoadDataset:

    def test_plain_csv(self, tmp_path):
        p = _write(tmp_path, "1,2,3\n4,5,6\n7,8,9\n10,11,12\n")
        ds = load_dataset(p)
        assert ds.n == 4 and ds.dim == 3
        assert ds.labels is None

    def test_label_column_last(self, tmp_path):
        p = _write(tmp_path, "1,2,0\n4,5,1\n7,8,0\n10,11,1\n")
        ds = load_dataset(p, label_column="last")
        assert ds.n == 4 and ds.dim == 2
        assert ds.labels.tolist() == [0, 1, 0, 1]

    def test_label_column_by_name(self, tmp_path):
        p = _write(tmp_path, "x,y,cls\n1,2,0\n4,5,1\n7,8,2\n")
        ds = load_dataset(p, has_header=True, label_column="cls")
        assert ds.dim == 2
        assert ds.labels.tolist() == [0, 1, 2]

    def test_ragged_row_raises(self, tmp_path):
        p = _write(tmp_path, "1,2,3\n4,5\n7,8,9\n")
        with pytest.raises(ParseError):
            load_dataset(p)

    def test_non_numeric_cell_raises(self, tmp_path):
        p = _write(tmp_path, "1,2,3\n4,oops,6\n7,8,9\n")
        with pytest.raises(ParseError):
            load_dataset(p)

    def test_too_few_rows_raises(self, tmp_path):
        p = _write(tmp_path, "1,2\n3,4\n")
        with pytest.raises(ValidationError):
            load_dataset(p)

    def test_roundtrip_bit_exact(self, tmp_path, rng):
        ds = Dataset(points=rng.standard_normal((10, 4)), name="rt")
        out = tmp_path / "rt.csv"
        write_dataset(ds, out)
        back = load_dataset(out)
        assert np.array_equal(back.points, ds.points)


class TestDatasetInvariants:

    def test_rejects_nan(self):
        pts = np.ones((4, 2))
        pts[1, 1] = np.nan
        with pytest.raises(ValidationError):
            Dataset(points=pts)

    def test_rejects_small_n(self):
        with pytest.raises(ValidationError):
            Dataset(points=np.ones((2, 3)))

    def test_label_length_checked(self):
        with pytest.raises(ValidationError):
            Dataset(points=np.ones((4, 2)), labels=[0, 1])

    def test_points_immutable(self, small_dataset):
        with pytest.raises(ValueError):
            small_dataset.points[0, 0] = 5.0

    def test_standardize_zscores(self, rng):
        ds = Dataset(points=rng.standard_normal((50, 3)) * 7 + 2)
        z = standardize(ds)
        assert np.allclose(z.points.mean(axis=0), 0, atol=1e-12)
        assert np.allclose(z.points.std(axis=0), 1, atol=1e-12)


class TestSubsample:

    def test_reduces_to_max_n(self, rng):
        ds = Dataset(points=rng.standard_normal((5000, 3)))
        out = subsample(ds, 3000, seed=1)
        assert out.n == 3000

    def test_noop_when_small(self, rng):
        ds = Dataset(points=rng.standard_normal((100, 3)))
        out = subsample(ds, 3000, seed=1)
        assert out is ds

    def test_deterministic(self, rng):
        ds = Dataset(points=rng.standard_normal((500, 3)))
        a = subsample(ds, 50, seed=9)
        b = subsample(ds, 50, seed=9)
        assert np.array_equal(a.points, b.points)

    def test_labels_carried(self, rng):
        pts = rng.standard_normal((200, 2))
        labels = np.arange(200)
        ds = Dataset(points=pts, labels=labels)
        out = subsample(ds, 20, seed=3)
        # each kept label still indexes its own row
        assert np.array_equal(pts[out.labels], out.points)

    def test_max_n_too_small(self, small_dataset):
        with pytest.raises(ValidationError):
            subsample(small_dataset, 2, seed=0)


class TestSynthetic:

    def test_iid_gaussian_shape(self):
        ds = generate_synthetic(SyntheticSpec(kind="iid-gaussian", n=500, d=2, seed=7))
        assert ds.points.shape == (500, 2)
        assert ds.labels is None

    def test_mixture_labels(self):
        spec = SyntheticSpec(kind="gaussian-mixture", n=300, d=10, seed=1,
                             params={"components": 3})
        ds = generate_synthetic(spec)
        assert set(ds.labels.tolist()) <= {0, 1, 2}

    def test_pure_function_of_spec(self):
        spec = SyntheticSpec(kind="swiss-roll", n=100, d=5, seed=12,
                             params={"noise": 0.1})
        a = generate_synthetic(spec)
        b = generate_synthetic(spec)
        assert np.array_equal(a.points, b.points)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            SyntheticSpec(kind="mystery", n=10, d=2, seed=0)

    def test_hyperplane_intrinsic_dim(self):
        spec = SyntheticSpec(kind="hyperplane-embedded", n=50, d=8, seed=3,
                             params={"intrinsic_dim": 2})
        ds = generate_synthetic(spec)
        # noiseless: rank 2 once centered
        centered = ds.points - ds.points.mean(axis=0)
        s = np.linalg.svd(centered, compute_uv=False)
        assert s[2] < 1e-10 * s[0]

    def test_corpus_diverse_and_deterministic(self):
        a = synthetic_corpus(10, seed=5)
        b = synthetic_corpus(10, seed=5)
        assert len(a) == 10
        assert all(np.array_equal(x.points, y.points) for x, y in zip(a, b))
        assert len({ds.points.shape for ds in a}) > 3


class TestManifest:

    def test_manifest_roundtrip(self, tmp_path, rng):
        for i in range(3):
            write_dataset(Dataset(points=rng.standard_normal((5, 2))),
                          tmp_path / f"d{i}.csv")
        manifest = [{"name": f"d{i}", "path": f"d{i}.csv"} for i in range(3)]
        mp = tmp_path / "manifest.json"
        mp.write_text(json.dumps(manifest))
        corpus = load_manifest(mp)
        assert [ds.name for ds in corpus] == ["d0", "d1", "d2"]
        assert all(ds.n == 5 for ds in corpus)
