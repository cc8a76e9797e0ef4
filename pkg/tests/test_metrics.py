"""Spatial metrics (geodesic / resistance / euclidean) and time separation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import netkernel as nk
from netkernel import Edge, Vertex, build_network
from netkernel.errors import (InconsistentNetworkError, InvalidParamsError,
                              MissingCoordinatesError)
from netkernel.metrics import temporal_separation


def pinv_resistance(net, points):
    """Independent oracle: Moore-Penrose pseudoinverse of the Laplacian of
    the augmented graph (interior points spliced into their edges)."""
    nodes = {}

    def node_of(key):
        if key not in nodes:
            nodes[key] = len(nodes)
        return nodes[key]

    cuts = {}
    for p in points:
        if not p.is_vertex:
            cuts.setdefault(p.ref, set()).add(p.offset)
    segments = []
    for eid in net.edge_ids:
        e = net.edge(eid)
        prev, prev_off = node_of(("v", e.u)), 0.0
        for off in sorted(cuts.get(eid, ())):
            nxt = node_of(("e", eid, off))
            segments.append((prev, nxt, off - prev_off))
            prev, prev_off = nxt, off
        segments.append((prev, node_of(("v", e.v)), e.length - prev_off))
    n = len(nodes)
    lap = np.zeros((n, n))
    for i, j, ln in segments:
        w = 1.0 / ln
        lap[i, i] += w
        lap[j, j] += w
        lap[i, j] -= w
        lap[j, i] -= w
    plus = np.linalg.pinv(lap)
    idx = [node_of(("v", p.ref) if p.is_vertex else ("e", p.ref, p.offset))
           for p in points]
    out = np.zeros((len(points), len(points)))
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            out[a, b] = plus[i, i] + plus[j, j] - 2 * plus[i, j]
    return out


class TestGeodesic:
    def test_interior_points_on_path(self, path3):
        p1 = path3.point_on_edge(0, 0.5)
        p2 = path3.point_on_edge(1, 1.0)
        assert nk.distance(path3, p1, p2, "geodesic") == pytest.approx(2.5)

    def test_wraps_around_cycle(self, cycle10):
        a = cycle10.point_at_vertex(0)
        b = cycle10.point_at_vertex(7)
        assert nk.distance(cycle10, a, b, "geodesic") == pytest.approx(3.0)

    def test_same_edge_points(self, path3):
        p1 = path3.point_on_edge(1, 0.5)
        p2 = path3.point_on_edge(1, 2.25)
        assert nk.distance(path3, p1, p2, "geodesic") == pytest.approx(1.75)

    def test_shortcut_through_vertex(self, theta_graph):
        # 0 -> 1 direct edge is 3.0 but the route through 2 is 2+2=4,
        # through 3 is 2.5+2.5=5; direct wins
        a = theta_graph.point_at_vertex(0)
        b = theta_graph.point_at_vertex(1)
        assert nk.distance(theta_graph, a, b, "geodesic") == \
            pytest.approx(3.0)

    def test_requires_consistency(self):
        net = build_network(
            [Vertex(0), Vertex(1), Vertex(2)],
            [Edge(0, 0, 1, 1.0), Edge(1, 1, 2, 1.0), Edge(2, 2, 0, 5.0)])
        a, b = net.point_at_vertex(0), net.point_at_vertex(2)
        with pytest.raises(InconsistentNetworkError):
            nk.distance(net, a, b, "geodesic")
        # resistance is still defined on such a network
        assert nk.distance(net, a, b, "resistance") > 0


class TestResistance:
    def test_cycle_closed_form(self, cycle10):
        # two arcs a and L-a in parallel: a(L-a)/L
        a = cycle10.point_at_vertex(0)
        b = cycle10.point_at_vertex(7)
        assert nk.distance(cycle10, a, b, "resistance") == \
            pytest.approx(3.0 * 7.0 / 10.0, rel=1e-12)

    def test_triangle_closed_form(self, triangle):
        # sides 1, 1, 1.5; between the endpoints of the 1-side:
        # 1 in parallel with 1+1.5 -> 1*2.5/3.5
        a = triangle.point_at_vertex(0)
        b = triangle.point_at_vertex(1)
        assert nk.distance(triangle, a, b, "resistance") == \
            pytest.approx(1.0 * 2.5 / 3.5, rel=1e-12)

    def test_equals_geodesic_on_trees(self, river):
        pts = nk.sample_points(river, 15, seed=2) + \
            [river.point_at_vertex(v) for v in river.vertex_ids[:5]]
        dg = nk.geodesic_matrix(river, pts).values
        dr = nk.resistance_matrix(river, pts).values
        assert np.max(np.abs(dr - dg) / (1.0 + dg)) < 1e-9

    def test_never_exceeds_geodesic(self, theta_graph, cycle10):
        for net in (theta_graph, cycle10):
            pts = nk.sample_points(net, 12, seed=3)
            dg = nk.geodesic_matrix(net, pts).values
            dr = nk.resistance_matrix(net, pts).values
            assert np.all(dr <= dg + 1e-12)

    def test_matches_pinv_oracle(self, theta_graph):
        pts = nk.sample_points(theta_graph, 8, seed=5) + \
            [theta_graph.point_at_vertex(v)
             for v in theta_graph.vertex_ids]
        got = nk.resistance_matrix(theta_graph, pts).values
        want = pinv_resistance(theta_graph, pts)
        assert np.max(np.abs(got - want)) < 1e-10

    def test_iterative_path_matches_dense(self, monkeypatch, theta_graph):
        pts = nk.sample_points(theta_graph, 10, seed=6)
        dense = nk.resistance_matrix(theta_graph, pts).values.copy()
        nk.clear_cache()
        monkeypatch.setattr("netkernel.metrics.DENSE_NODE_LIMIT", 2)
        iterative = nk.resistance_matrix(theta_graph, pts).values
        nk.clear_cache()
        assert np.max(np.abs(dense - iterative)) < 1e-8

    def test_duplicate_locations_share_zero(self, cycle10):
        p = cycle10.point_on_edge(0, 0.25)
        mat = nk.resistance_matrix(cycle10, [p, p]).values
        assert mat[0, 1] == 0.0


class TestEuclidean:
    @pytest.fixture()
    def segment345(self):
        return build_network(
            [Vertex(0, 0.0, 0.0), Vertex(1, 3.0, 4.0)],
            [Edge(0, 0, 1, 6.0)])

    def test_endpoints(self, segment345):
        a = segment345.point_at_vertex(0)
        b = segment345.point_at_vertex(1)
        assert nk.distance(segment345, a, b, "euclidean") == \
            pytest.approx(5.0)

    def test_interior_interpolates(self, segment345):
        a = segment345.point_at_vertex(0)
        mid = segment345.point_on_edge(0, 3.0)
        assert nk.distance(segment345, a, mid, "euclidean") == \
            pytest.approx(2.5)

    def test_requires_coordinates(self):
        net = nk.network_from_json(
            {"vertices": [{"id": 0}, {"id": 1}],
             "edges": [{"id": 0, "u": 0, "v": 1, "length": 1.0}]})
        with pytest.raises(MissingCoordinatesError):
            nk.euclidean_matrix(net, [net.point_at_vertex(0),
                                      net.point_at_vertex(1)])
        # graph metrics do not need an embedding
        assert nk.distance(net, net.point_at_vertex(0),
                           net.point_at_vertex(1), "geodesic") == 1.0


class TestMatrixProperties:
    @pytest.mark.parametrize("metric", ["geodesic", "resistance",
                                        "euclidean"])
    def test_symmetric_zero_diag_nonneg(self, river, metric):
        pts = nk.sample_points(river, 10, seed=1)
        m = nk.distance_matrix(river, pts, metric).values
        assert np.array_equal(m, m.T)
        assert np.all(np.diag(m) == 0.0)
        assert np.all(m >= 0.0)

    @pytest.mark.parametrize("metric", ["geodesic", "resistance",
                                        "euclidean"])
    def test_triangle_inequality(self, river, metric):
        pts = nk.sample_points(river, 8, seed=4)
        m = nk.distance_matrix(river, pts, metric).values
        n = len(pts)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert m[i, j] <= m[i, k] + m[k, j] + 1e-9

    def test_permutation_consistency(self, cycle10):
        pts = nk.sample_points(cycle10, 6, seed=7)
        perm = [3, 0, 5, 1, 4, 2]
        base = nk.resistance_matrix(cycle10, pts).values
        shuffled = nk.resistance_matrix(
            cycle10, [pts[i] for i in perm]).values
        assert np.allclose(shuffled, base[np.ix_(perm, perm)],
                           rtol=0, atol=1e-12)

    def test_unknown_metric(self, path3):
        with pytest.raises(InvalidParamsError):
            nk.distance_matrix(path3, [path3.point_at_vertex(0)], "manhattan")

    def test_cache_reuses_array(self, path3):
        nk.clear_cache()
        pts = [path3.point_at_vertex(0), path3.point_at_vertex(2)]
        first = nk.distance_matrix(path3, pts, "geodesic")
        second = nk.distance_matrix(path3, list(pts), "geodesic")
        assert first.values is second.values
        assert not first.values.flags.writeable

    def test_distance_matrix_metadata(self, path3):
        pts = [path3.point_at_vertex(0), path3.point_at_vertex(2)]
        dm = nk.geodesic_matrix(path3, pts)
        assert dm.metric == "geodesic"
        assert dm.n == 2
        assert dm[0, 1] == 5.0


class TestTemporal:
    def test_linear(self):
        out = temporal_separation([0.8], [2.0], kind="linear")
        assert out.shape == (1, 1)
        assert out[0, 0] == pytest.approx(1.2)

    def test_circular_wraps(self):
        out = temporal_separation([0.0], [1.5 * np.pi], kind="circular")
        assert out[0, 0] == pytest.approx(0.5 * np.pi)

    def test_single_argument_symmetric(self):
        out = temporal_separation([0.0, 1.0, 3.0], kind="linear")
        assert out.shape == (3, 3)
        assert np.array_equal(out, out.T)
        assert np.all(np.diag(out) == 0.0)
        assert out[0, 2] == 3.0

    @given(st.lists(st.floats(0, 1000, allow_nan=False), min_size=1,
                    max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_circular_range(self, times):
        out = temporal_separation(times, kind="circular")
        assert np.all(out >= 0.0)
        assert np.all(out <= np.pi + 1e-12)

    def test_unknown_kind(self):
        with pytest.raises(InvalidParamsError):
            temporal_separation([0.0], kind="weekly")
