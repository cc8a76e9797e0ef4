"""Distance computations between points on a network, plus temporal
separation.

Three spatial metrics are supported:

- ``geodesic``: shortest-path length through the network.  Interior points
  are spliced into their edges (an augmented graph whose extra nodes split
  edges into segments) and all-pairs distances come from Dijkstra runs on
  that graph.  Requires a distance-consistent network.
- ``resistance``: effective resistance between the same augmented nodes,
  treating each segment as a resistor equal to its length.  Computed from
  grounded symmetric solves of the weighted graph Laplacian (dense Cholesky
  up to :data:`DENSE_NODE_LIMIT` nodes, conjugate gradients beyond).
  Coincides with the geodesic metric on trees.
- ``euclidean``: straight-line distance between the planar embeddings of
  the points; requires coordinates on every vertex.

Matrices are cached per (network content, metric, point sequence) because
simulation studies evaluate many kernels over a fixed design.
"""

from __future__ import annotations

from collections import OrderedDict, defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra
from scipy.sparse.linalg import LinearOperator, cg as _cg

from .errors import (
    InconsistentNetworkError,
    InvalidParamsError,
    MissingCoordinatesError,
    SingularSystemError,
)
from .network import Network, PointOnNetwork, check_distance_consistency

SPATIAL_METRICS = ("geodesic", "resistance", "euclidean")
TIME_KINDS = ("linear", "circular")

#: above this augmented-node count, resistance solves go iterative
DENSE_NODE_LIMIT = 2000

_CACHE_MAX = 32
_cache: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
_consistent_keys: set = set()


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances plus the metric that produced them."""

    values: np.ndarray
    metric: str

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, idx):
        return self.values[idx]


def _point_key(p: PointOnNetwork):
    if p.is_vertex:
        return ("v", p.ref)
    return ("e", p.ref, p.offset)


def _augmented_graph(net: Network, points: Sequence[PointOnNetwork]):
    """Split edges at the interior points.

    Returns (segments, point_nodes, node_count) where segments is a list of
    (node_i, node_j, length) and point_nodes[k] is the augmented-graph node
    of points[k].  Distinct points at the same location share a node.
    """
    vindex = {vid: i for i, vid in enumerate(net.vertex_ids)}
    node_count = net.n_vertices
    loc_index = {}
    by_edge = defaultdict(list)
    point_nodes = []
    for p in points:
        if p.is_vertex:
            if p.ref not in vindex:
                raise InvalidParamsError(f"point references missing vertex {p.ref}")
            point_nodes.append(vindex[p.ref])
            continue
        edge = net.edge(p.ref)
        if not (0.0 < p.offset < edge.length):
            raise InvalidParamsError(
                f"point offset {p.offset} outside edge {p.ref} interior")
        key = (p.ref, p.offset)
        if key not in loc_index:
            loc_index[key] = node_count
            by_edge[p.ref].append((p.offset, node_count))
            node_count += 1
        point_nodes.append(loc_index[key])

    segments = []
    for eid in net.edge_ids:
        e = net.edge(eid)
        chain = ([(0.0, vindex[e.u])] + sorted(by_edge.get(eid, ()))
                 + [(e.length, vindex[e.v])])
        for (off_a, node_a), (off_b, node_b) in zip(chain, chain[1:]):
            segments.append((node_a, node_b, off_b - off_a))
    return segments, np.array(point_nodes), node_count


def _segment_csr(segments, node_count):
    rows, cols, vals = [], [], []
    for i, j, length in segments:
        rows += [i, j]
        cols += [j, i]
        vals += [length, length]
    return csr_matrix((vals, (rows, cols)), shape=(node_count, node_count))


def _require_consistent(net: Network):
    if net.content_key in _consistent_keys:
        return
    bad = check_distance_consistency(net)
    if bad:
        raise InconsistentNetworkError(
            f"geodesic metric needs a distance-consistent network; "
            f"edges {bad} admit shorter alternative paths")
    _consistent_keys.add(net.content_key)


def _geodesic_matrix(net, points):
    _require_consistent(net)
    segments, point_nodes, node_count = _augmented_graph(net, points)
    graph = _segment_csr(segments, node_count)
    sources = np.unique(point_nodes)
    dist = _csgraph_dijkstra(graph, directed=False, indices=sources)
    row_of = {node: r for r, node in enumerate(sources)}
    rows = np.array([row_of[node] for node in point_nodes])
    full = dist[rows][:, point_nodes]
    full = 0.5 * (full + full.T)
    np.fill_diagonal(full, 0.0)
    return full


def _grounded_laplacian(segments, node_count):
    lap = np.zeros((node_count, node_count))
    for i, j, length in segments:
        c = 1.0 / length
        lap[i, i] += c
        lap[j, j] += c
        lap[i, j] -= c
        lap[j, i] -= c
    return lap[1:, 1:]


def _grounded_columns_dense(reduced, rhs):
    try:
        factor = cho_factor(reduced, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "grounded Laplacian not positive definite; resistance solve "
            "broke down") from exc
    return cho_solve(factor, rhs)


def _grounded_columns_cg(reduced, rhs):
    sparse = csr_matrix(reduced)
    precond_diag = 1.0 / sparse.diagonal()
    precond = LinearOperator(sparse.shape, matvec=lambda x: precond_diag * x)
    out = np.empty_like(rhs)
    for k in range(rhs.shape[1]):
        sol, info = _cg(sparse, rhs[:, k], rtol=1e-10, atol=0.0, M=precond)
        if info != 0:
            raise SingularSystemError(
                f"conjugate-gradient resistance solve failed (info={info})")
        out[:, k] = sol
    return out


def _resistance_matrix(net, points, dense_limit=None):
    segments, point_nodes, node_count = _augmented_graph(net, points)
    reduced = _grounded_laplacian(segments, node_count)
    # grounded inverse columns for the point nodes only; node 0 is ground
    # (its grounded row and column are identically zero)
    cols = np.unique(point_nodes)
    rhs = np.zeros((node_count - 1, len(cols)))
    for k, node in enumerate(cols):
        if node > 0:
            rhs[node - 1, k] = 1.0
    limit = DENSE_NODE_LIMIT if dense_limit is None else dense_limit
    if node_count <= limit:
        sol = _grounded_columns_dense(reduced, rhs)
    else:
        sol = _grounded_columns_cg(reduced, rhs)
    grounded = np.zeros((node_count, len(cols)))
    grounded[1:, :] = sol
    col_of = {node: k for k, node in enumerate(cols)}
    sub = grounded[np.ix_(cols, [col_of[n] for n in cols])]
    diag = np.diag(sub)
    res = diag[:, None] + diag[None, :] - 2.0 * sub
    idx = np.array([col_of[n] for n in point_nodes])
    full = res[np.ix_(idx, idx)]
    full = 0.5 * (full + full.T)
    np.clip(full, 0.0, None, out=full)
    np.fill_diagonal(full, 0.0)
    return full


def _euclidean_matrix(net, points):
    if not net.has_coords():
        raise MissingCoordinatesError(
            "euclidean metric needs x,y coordinates on every vertex")
    coords = np.array([net.point_coords(p) for p in points])
    diff = coords[:, None, :] - coords[None, :, :]
    full = np.sqrt((diff ** 2).sum(axis=-1))
    full = 0.5 * (full + full.T)
    np.fill_diagonal(full, 0.0)
    return full


_METRIC_FUNCS = {
    "geodesic": _geodesic_matrix,
    "resistance": _resistance_matrix,
    "euclidean": _euclidean_matrix,
}


def _cached_values(net, points, metric):
    key = (net.content_key, metric, tuple(_point_key(p) for p in points))
    hit = _cache.get(key)
    if hit is None:
        hit = _METRIC_FUNCS[metric](net, points)
        hit.setflags(write=False)
        _cache[key] = hit
        while len(_cache) > _CACHE_MAX:
            _cache.popitem(last=False)
    else:
        _cache.move_to_end(key)
    return hit


def distance_matrix(net: Network, points: Sequence[PointOnNetwork],
                    metric: str) -> DistanceMatrix:
    """Pairwise distances under one of :data:`SPATIAL_METRICS`; cached."""
    if metric not in _METRIC_FUNCS:
        raise InvalidParamsError(
            f"unknown metric {metric!r}; expected one of {SPATIAL_METRICS}")
    return DistanceMatrix(_cached_values(net, points, metric), metric)


def geodesic_matrix(net: Network, points: Sequence[PointOnNetwork]) -> DistanceMatrix:
    """Shortest-path distances; zero diagonal, symmetric.  Raises
    InconsistentNetworkError when some edge is not a shortest path between
    its own endpoints."""
    return distance_matrix(net, points, "geodesic")


def resistance_matrix(net: Network, points: Sequence[PointOnNetwork]) -> DistanceMatrix:
    """Effective-resistance distances (edge segment = resistor of its
    length).  Equals the geodesic matrix on trees; parallel routes shrink
    it on networks with cycles."""
    return distance_matrix(net, points, "resistance")


def euclidean_matrix(net: Network, points: Sequence[PointOnNetwork]) -> DistanceMatrix:
    """Straight-line distances between planar embeddings (interior points
    interpolate linearly along their edge)."""
    return distance_matrix(net, points, "euclidean")


def clear_cache() -> None:
    _cache.clear()
    _consistent_keys.clear()


def distance(net: Network, p: PointOnNetwork, q: PointOnNetwork,
             metric: str) -> float:
    """Distance between two points under the named metric."""
    return float(distance_matrix(net, (p, q), metric).values[0, 1])


def temporal_separation(times_a, times_b=None, kind: str = "linear") -> np.ndarray:
    """Pairwise separation between time stamps.

    ``linear`` is plain absolute difference.  ``circular`` treats times as
    angles with period 2*pi and returns arc distance in [0, pi].
    With one argument the full symmetric matrix among those times is
    returned; with two, the cross matrix.
    """
    if kind not in TIME_KINDS:
        raise InvalidParamsError(
            f"unknown time kind {kind!r}; expected one of {TIME_KINDS}")
    a = np.asarray(times_a, dtype=float)
    b = a if times_b is None else np.asarray(times_b, dtype=float)
    diff = np.abs(a[:, None] - b[None, :])
    if kind == "circular":
        diff = np.mod(diff, 2.0 * np.pi)
        diff = np.minimum(diff, 2.0 * np.pi - diff)
    return diff
