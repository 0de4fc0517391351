import numpy as np
import pytest

from topoclass.data import LabeledPointCloud, gen_annulus2d
from topoclass.errors import (
    DomainError,
    EmptyInputError,
    NumericalError,
    SeparationError,
    SpecError,
)
from topoclass.network import LayerSpec, Mlp, build_relu_net, forward
from topoclass.numerics import make_rng
from topoclass.topology import (
    KernelWitness,
    check_disc_separation,
    check_thm3,
    component_count,
    full_separability_report,
    kernel_witness,
    linear_rank,
    min_enclosing_ball,
    simplex_class,
    urysohn_binary,
    urysohn_multiclass,
)
from topoclass.training import accuracy


def nearest_vertex_oracle(y, tol=1e-12):
    """Brute-force nearest simplex vertex by explicit distances."""
    c = y.shape[0]
    d2 = np.empty(c)
    for i in range(c):
        v = np.zeros(c)
        v[i] = 1.0
        d2[i] = ((y - v) ** 2).sum()
    best = d2.min()
    # distance-squared gaps are 2x coordinate gaps on the simplex
    winners = np.nonzero(d2 <= best + 2.0 * tol)[0]
    if winners.size != 1:
        return None
    return int(winners[0])


class TestSimplexClass:
    def test_clear_class(self):
        assert simplex_class(np.array([0.9, 0.1])) == 0

    def test_tie_is_boundary(self):
        assert simplex_class(np.array([0.5, 0.5])) is None

    def test_matches_distance_oracle(self):
        rng = make_rng(1)
        for _ in range(1000):
            c = int(rng.integers(2, 7))
            y = rng.dirichlet(np.ones(c))
            assert simplex_class(y) == nearest_vertex_oracle(y)

    def test_rejects_non_simplex(self):
        with pytest.raises(DomainError):
            simplex_class(np.array([0.9, 0.3]))
        with pytest.raises(DomainError):
            simplex_class(np.array([-0.2, 1.2]))


class TestCheckThm3:
    def constant_net(self, logits):
        return Mlp(
            layers=(
                LayerSpec(
                    weight=np.zeros((len(logits), 2)),
                    bias=np.asarray(logits, dtype=np.float64),
                    activation="softmax",
                ),
            )
        )

    def test_trained_net_separates(self, trained_paper_net, annulus500):
        report = check_thm3(trained_paper_net, annulus500)
        assert report.voronoi_ok
        assert report.violating_points == ()

    def test_constant_net_lists_one_class(self, annulus500):
        report = check_thm3(self.constant_net([1.0, 0.0]), annulus500)
        assert not report.voronoi_ok
        bad = report.violating_points
        assert len(bad) == 500
        assert all(true == 1 and assigned == 0 for _, assigned, true in bad)

    def test_violations_empty_iff_accuracy_one(self, annulus500):
        rng = make_rng(2)
        for seed in range(3):
            net = build_relu_net((2, 4, 2), make_rng(seed))
            report = check_thm3(net, annulus500)
            acc = accuracy(net, annulus500)
            assert (report.violating_points == ()) == (acc == 1.0)


class TestMinEnclosingBall:
    def test_single_point(self):
        disc = min_enclosing_ball(np.array([[2.0, 3.0]]))
        assert disc.radius == 0.0
        np.testing.assert_array_equal(disc.center, [2.0, 3.0])

    def test_two_points(self):
        disc = min_enclosing_ball(np.array([[0.0, 0.0], [2.0, 0.0]]))
        np.testing.assert_allclose(disc.center, [1.0, 0.0], atol=1e-12)
        assert abs(disc.radius - 1.0) < 1e-12

    def test_equilateral_triangle_circumradius(self):
        tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])
        disc = min_enclosing_ball(tri)
        assert abs(disc.radius - 1.0 / np.sqrt(3.0)) < 1e-9

    def test_containment_random_low_dims(self):
        rng = make_rng(3)
        for dim in (1, 2, 3):
            pts = rng.standard_normal((80, dim))
            disc = min_enclosing_ball(pts)
            gaps = np.linalg.norm(pts - disc.center, axis=1)
            assert (gaps <= disc.radius + 1e-9).all()
            # the MEB radius is at least half the diameter
            assert disc.radius >= gaps.max() / 2.0

    def test_high_dim_fallback_slack(self):
        # +-2 e_i in R^5: optimal ball is radius 2 at the origin
        cross = np.concatenate([2.0 * np.eye(5), -2.0 * np.eye(5)])
        disc = min_enclosing_ball(cross)
        gaps = np.linalg.norm(cross - disc.center, axis=1)
        assert (gaps <= disc.radius + 1e-9).all()
        assert disc.radius <= 2.0 * 1.01

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            min_enclosing_ball(np.zeros((0, 2)))


class TestDiscSeparation:
    def test_far_clusters(self):
        rng = make_rng(4)
        a = rng.standard_normal((30, 2)) * 0.5
        b = rng.standard_normal((30, 2)) * 0.5 + [10.0, 0.0]
        ok, discs, gap = check_disc_separation([a, b])
        assert ok
        assert gap > 0.0
        assert len(discs) == 2

    def test_identical_clouds_fail(self):
        pts = make_rng(5).standard_normal((20, 2))
        ok, _, gap = check_disc_separation([pts, pts.copy()])
        assert not ok
        assert gap <= 0.0

    def test_one_dimensional_intervals(self):
        a = np.linspace(0.0, 0.4, 9).reshape(-1, 1)
        b = np.linspace(0.6, 1.0, 9).reshape(-1, 1)
        ok, discs, gap = check_disc_separation([a, b])
        assert ok
        assert abs(gap - 0.2) < 1e-12
        assert abs(discs[0].radius - 0.2) < 1e-12


class TestUrysohnBinary:
    def test_exact_on_members(self):
        cloud = gen_annulus2d(100, 1)
        f = urysohn_binary(cloud.class_points(0), cloud.class_points(1))
        assert np.abs(f(cloud.class_points(0))).max() == 0.0
        assert np.abs(f(cloud.class_points(1)) - 1.0).max() == 0.0

    def test_equidistant_midpoint(self):
        f = urysohn_binary(np.array([[0.0]]), np.array([[2.0]]))
        assert f(np.array([1.0])) == 0.5

    def test_hand_value(self):
        f = urysohn_binary(np.array([[0.0]]), np.array([[1.0]]))
        assert abs(f(np.array([0.25])) - 0.25) < 1e-15

    def test_range_bounded(self):
        cloud = gen_annulus2d(50, 2)
        f = urysohn_binary(cloud.class_points(0), cloud.class_points(1))
        probes = make_rng(3).uniform(-3, 3, size=(500, 2))
        vals = f(probes)
        assert vals.min() >= 0.0 and vals.max() <= 1.0

    def test_overlap_rejected(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0]])
        with pytest.raises(SeparationError):
            urysohn_binary(pts, pts[:1])


class TestUrysohnMulticlass:
    def test_agrees_with_binary(self):
        cloud = gen_annulus2d(60, 4)
        classes = cloud.split_by_class()
        f2 = urysohn_binary(classes[0], classes[1])
        fm = urysohn_multiclass(classes)
        probes = make_rng(5).uniform(-2.5, 2.5, size=(300, 2))
        assert np.abs(f2(probes) - fm(probes)).max() < 1e-12

    def test_exact_on_members(self):
        classes = [np.array([[0.0, 0.0]]), np.array([[3.0, 0.0]]), np.array([[0.0, 3.0]])]
        f = urysohn_multiclass(classes)
        for k, pts in enumerate(classes):
            assert f(pts[0]) == float(k)

    def test_collinear_singletons(self):
        f = urysohn_multiclass([np.array([[0.0]]), np.array([[1.0]]), np.array([[2.0]])])
        assert f(np.array([1.0])) == 1.0

    def test_needs_two_classes(self):
        with pytest.raises(SeparationError):
            urysohn_multiclass([np.array([[0.0]])])


class TestKernelWitness:
    def test_explicit_kernel(self):
        w = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        witness = kernel_witness(w)
        np.testing.assert_allclose(np.abs(witness.direction), [0.0, 0.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(np.abs(witness.p1), [0.0, 0.0, 0.5], atol=1e-12)
        np.testing.assert_allclose(np.abs(witness.p2), [0.0, 0.0, 1.5], atol=1e-12)

    def test_first_layer_collision(self):
        rng = make_rng(6)
        for _ in range(20):
            rows = int(rng.integers(1, 4))
            cols = int(rng.integers(rows + 1, 7))
            w = rng.uniform(-1, 1, size=(rows, cols))
            b = rng.uniform(-1, 1, size=rows)
            witness = kernel_witness(w)
            f1 = Mlp(layers=(LayerSpec(weight=w, bias=b, activation="relu"),))
            gap = np.abs(forward(f1, witness.p1) - forward(f1, witness.p2)).max()
            assert gap <= 1e-9

    def test_full_net_collision_and_accuracy_bound(self):
        rng = make_rng(7)
        for trial in range(10):
            cols = int(rng.integers(2, 6))
            w = rng.uniform(-1, 1, size=(1, cols))
            witness = kernel_witness(w)
            first = LayerSpec(weight=w, bias=rng.uniform(-1, 1, 1), activation="relu")
            tail = build_relu_net((1, 4, 2), make_rng(50 + trial))
            net = Mlp(layers=(first,) + tail.layers)
            out_gap = np.abs(forward(net, witness.p1) - forward(net, witness.p2)).max()
            assert out_gap <= 1e-9
            cloud = LabeledPointCloud(
                dim=cols,
                points=np.stack([witness.p1, witness.p2]),
                labels=np.array([0, 1]),
                class_count=2,
            )
            assert accuracy(net, cloud) <= 0.5

    def test_radii_constraints_by_construction(self):
        w = make_rng(8).uniform(-1, 1, size=(2, 5))
        witness = kernel_witness(w)
        assert abs(np.linalg.norm(witness.p1) - 0.5) < 1e-12
        assert abs(np.linalg.norm(witness.p2) - 1.5) < 1e-12

    def test_no_bottleneck_rejected(self):
        with pytest.raises(SpecError):
            kernel_witness(np.eye(3))

    def test_witness_invariants_enforced(self):
        with pytest.raises(NumericalError):
            KernelWitness(
                direction=np.array([2.0, 0.0]),
                p1=np.array([0.5, 0.0]),
                p2=np.array([1.5, 0.0]),
                output_gap=0.0,
            )


class TestDiagnostics:
    def test_line_has_rank_one(self):
        t = np.linspace(0.0, 1.0, 30)[:, np.newaxis]
        pts = t @ np.array([[1.0, 2.0, -1.0]])
        assert linear_rank(pts) == 1

    def test_single_point_rank_zero(self):
        assert linear_rank(np.array([[1.0, 2.0, 3.0]])) == 0

    def test_generic_cloud_full_rank(self):
        pts = make_rng(9).standard_normal((100, 5))
        assert linear_rank(pts) == 5

    def test_two_far_clusters(self):
        # two small rings 100x their diameter apart; rings stay internally
        # connected at any k >= 1
        theta = np.linspace(0.0, 2 * np.pi, 25, endpoint=False)
        ring = 0.5 * np.column_stack([np.cos(theta), np.sin(theta)])
        far = ring + [100.0, 0.0]
        assert component_count(np.concatenate([ring, far]), 3) == 2

    def test_single_cluster(self):
        theta = np.linspace(0.0, 2 * np.pi, 40, endpoint=False)
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
        assert component_count(pts, 3) == 1

    def test_matches_bfs_oracle(self):
        from topoclass.isomap import knn_graph

        rng = make_rng(12)
        for _ in range(10):
            pts = rng.standard_normal((25, 2))
            k = int(rng.integers(1, 6))
            graph = knn_graph(pts, k)
            # BFS flood fill over the adjacency matrix
            n = pts.shape[0]
            seen = np.zeros(n, dtype=bool)
            comps = 0
            for start in range(n):
                if seen[start]:
                    continue
                comps += 1
                stack = [start]
                seen[start] = True
                while stack:
                    u = stack.pop()
                    for v in np.nonzero(graph.weights[u] > 0)[0]:
                        if not seen[v]:
                            seen[v] = True
                            stack.append(int(v))
            assert component_count(pts, k) == comps

    def test_component_count_validates_k(self):
        pts = np.zeros((5, 2))
        with pytest.raises(SpecError):
            component_count(pts, 0)
        with pytest.raises(SpecError):
            component_count(pts, 5)


def test_full_report_combines_criteria(trained_paper_net, annulus500):
    report = full_separability_report(trained_paper_net, annulus500)
    assert report.voronoi_ok
    assert report.disc_ok
    assert report.min_inter_disc_gap > 0.0
    payload = report.to_jsonable()
    assert set(payload) == {
        "voronoi_ok", "violating_points", "disc_ok", "discs", "min_inter_disc_gap",
    }
