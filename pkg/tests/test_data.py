import json

import numpy as np
import pytest

from topoclass.data import (
    LabeledPointCloud,
    ShellSpec,
    cloud_to_csv,
    gen_annulus2d,
    gen_nested_shells,
    gen_shells,
    load_cloud,
    save_cloud,
)
from topoclass.errors import ParseError, SchemaError, SpecError


def norms(points):
    return np.sqrt((points * points).sum(axis=1))


class TestGenShells:
    def test_bounds_are_hard(self):
        cloud = gen_shells(ShellSpec(dim=2, samples_per_class=10_000, seed=1))
        inner = norms(cloud.class_points(0))
        outer = norms(cloud.class_points(1))
        assert inner.max() <= 0.9
        assert outer.min() >= 1.0
        assert outer.max() <= 2.0

    def test_disc_mean_norm_matches_density(self):
        # E[r] for uniform on a disc of radius R is (2/3) R
        cloud = gen_shells(ShellSpec(dim=2, samples_per_class=10_000, seed=2))
        mean = norms(cloud.class_points(0)).mean()
        assert abs(mean - (2.0 / 3.0) * 0.9) < 0.05 * (2.0 / 3.0) * 0.9

    def test_single_sample_per_class(self):
        cloud = gen_shells(ShellSpec(dim=4, samples_per_class=1, seed=3))
        assert len(cloud) == 2
        assert sorted(cloud.labels.tolist()) == [0, 1]

    def test_deterministic(self):
        spec = ShellSpec(dim=3, samples_per_class=50, seed=9)
        a = gen_shells(spec)
        b = gen_shells(spec)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.labels, b.labels)

    def test_invalid_radii(self):
        with pytest.raises(SpecError):
            ShellSpec(dim=2, inner_max_radius=1.5, outer_min_radius=1.0, outer_max_radius=2.0)
        with pytest.raises(SpecError):
            ShellSpec(dim=2, inner_max_radius=0.0)
        with pytest.raises(SpecError):
            ShellSpec(dim=0)


class TestAnnulus:
    def test_counts_and_classes(self):
        cloud = gen_annulus2d(500, 7)
        assert len(cloud) == 1000
        assert cloud.dim == 2
        assert cloud.class_count == 2

    def test_norm_cap(self):
        cloud = gen_annulus2d(500, 7)
        assert norms(cloud.points).max() <= 2.0

    def test_radial_gap_is_empty(self):
        cloud = gen_annulus2d(2000, 11)
        r = norms(cloud.points)
        assert not ((r > 0.9) & (r < 1.0)).any()


class TestNestedShells:
    def test_three_bands(self):
        cloud = gen_nested_shells(2, [(0.0, 0.5), (1.0, 1.5), (2.0, 2.5)], 100, 5)
        assert cloud.class_count == 3
        for k, (lo, hi) in enumerate([(0.0, 0.5), (1.0, 1.5), (2.0, 2.5)]):
            r = norms(cloud.class_points(k))
            assert r.min() >= lo and r.max() <= hi

    def test_touching_bands_rejected(self):
        with pytest.raises(SpecError):
            gen_nested_shells(2, [(0.0, 1.0), (1.0, 2.0)], 10, 0)

    def test_bad_band(self):
        with pytest.raises(SpecError):
            gen_nested_shells(2, [(0.5, 0.2)], 10, 0)


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path):
        cloud = gen_shells(ShellSpec(dim=3, samples_per_class=40, seed=13))
        path = tmp_path / "cloud.json"
        save_cloud(cloud, path)
        back = load_cloud(path)
        assert back.dim == cloud.dim
        assert back.class_count == cloud.class_count
        assert np.array_equal(back.points, cloud.points)
        assert np.array_equal(back.labels, cloud.labels)

    def test_malformed_json_is_parse_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": 2, "points": [[')
        with pytest.raises(ParseError):
            load_cloud(path)

    def test_empty_points_rejected(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text('{"dim": 2, "class_count": 1, "points": [], "labels": []}')
        with pytest.raises(SchemaError):
            load_cloud(path)

    def test_label_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "badlabel.json"
        payload = {"dim": 1, "class_count": 2, "points": [[0.0], [1.0]], "labels": [0, 2]}
        path.write_text(json.dumps(payload))
        with pytest.raises(SchemaError):
            load_cloud(path)

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "nokey.json"
        path.write_text('{"dim": 2, "points": [[0.0, 0.0]], "labels": [0]}')
        with pytest.raises(SchemaError):
            load_cloud(path)

    def test_ragged_point_rejected(self, tmp_path):
        path = tmp_path / "ragged.json"
        payload = {"dim": 2, "class_count": 1, "points": [[0.0, 1.0], [2.0]], "labels": [0, 0]}
        path.write_text(json.dumps(payload))
        with pytest.raises(SchemaError):
            load_cloud(path)


class TestCloudInvariants:
    def test_every_class_must_appear(self):
        with pytest.raises(SchemaError):
            LabeledPointCloud(
                dim=1, points=np.array([[0.0], [1.0]]), labels=np.array([0, 0]), class_count=2
            )

    def test_length_mismatch(self):
        with pytest.raises(SchemaError):
            LabeledPointCloud(
                dim=1, points=np.array([[0.0], [1.0]]), labels=np.array([0]), class_count=1
            )

    def test_non_finite_coordinates(self):
        with pytest.raises(SchemaError):
            LabeledPointCloud(
                dim=1, points=np.array([[np.inf]]), labels=np.array([0]), class_count=1
            )


def test_csv_export(tmp_path):
    cloud = gen_annulus2d(5, 3)
    path = tmp_path / "cloud.csv"
    cloud_to_csv(cloud, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x0,x1,label"
    assert len(lines) == 11
    first = lines[1].split(",")
    assert float(first[0]) == cloud.points[0, 0]
