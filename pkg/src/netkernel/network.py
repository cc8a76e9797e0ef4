"""Networks with Euclidean edges: construction, validation, classification,
generation, point sampling, and file IO.

A network here is a finite simple connected graph whose edges carry positive
lengths.  Points live either at a vertex or in the interior of an edge
(offset strictly between 0 and the edge length); vertex points are always
canonicalized to the vertex form so point equality is decidable.  Networks
are immutable after construction: metric code caches per-network
factorizations and relies on that.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .errors import (
    DanglingEndpointError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    FileFormatError,
    InvalidParamsError,
    NonPositiveLengthError,
    SelfLoopError,
)

#: relative tolerance for the distance-consistency check
CONSISTENCY_RTOL = 1e-12


@dataclass(frozen=True)
class Vertex:
    """Graph vertex; planar coordinates are optional and only used by the
    ambient-Euclidean metric."""

    id: int
    x: Optional[float] = None
    y: Optional[float] = None

    @property
    def coords(self):
        if self.x is None or self.y is None:
            return None
        return (self.x, self.y)


@dataclass(frozen=True)
class Edge:
    """Undirected edge between vertices ``u`` and ``v`` with positive length."""

    id: int
    u: int
    v: int
    length: float


@dataclass(frozen=True)
class PointOnNetwork:
    """A location on a network: at a vertex, or inside an edge.

    ``kind`` is ``"vertex"`` (``ref`` = vertex id, offset ignored) or
    ``"edge"`` (``ref`` = edge id, ``offset`` in the open interval
    (0, length)).  Use :meth:`Network.point_at_vertex` /
    :meth:`Network.point_on_edge` to get validated instances.
    """

    kind: str
    ref: int
    offset: float = 0.0

    @property
    def is_vertex(self) -> bool:
        return self.kind == "vertex"


#: topology kinds returned by classify_topology
TREE = "euclidean_tree"
CYCLES_AND_TREES = "one_sum_cycles_trees"
GENERAL = "general"


@dataclass(frozen=True)
class TopologyClass:
    """Coarse shape of a network, as needed by kernel validity rules.

    ``euclidean_tree`` (with exact leaf count), ``one_sum_cycles_trees``
    (every biconnected block is a single edge or a simple cycle), or
    ``general`` (anything else).
    """

    kind: str
    leaf_count: Optional[int] = None

    @property
    def is_tree(self) -> bool:
        return self.kind == TREE

    @property
    def is_cycles_and_trees(self) -> bool:
        return self.kind in (TREE, CYCLES_AND_TREES)


class Network:
    """Immutable validated graph with Euclidean edges.

    Construct via :func:`build_network`; the constructor itself performs the
    full validation (named errors for each malformed-input case) and builds
    the adjacency index.
    """

    __slots__ = ("_vertices", "_edges", "_adjacency", "_vorder", "_eorder",
                 "_content_key")

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Edge]):
        vlist = [v if isinstance(v, Vertex) else Vertex(*v) for v in vertices]
        elist = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
        if not vlist:
            raise InvalidParamsError("network needs at least one vertex")

        vmap = {}
        for v in vlist:
            if v.id in vmap:
                raise InvalidParamsError(f"duplicate vertex id {v.id}")
            vmap[v.id] = v

        emap = {}
        seen_pairs = set()
        for e in elist:
            if e.u == e.v:
                raise SelfLoopError(f"edge {e.id} joins vertex {e.u} to itself")
            for end in (e.u, e.v):
                if end not in vmap:
                    raise DanglingEndpointError(
                        f"edge {e.id} references missing vertex {end}")
            if not (e.length > 0) or not math.isfinite(e.length):
                raise NonPositiveLengthError(
                    f"edge {e.id} has non-positive length {e.length}")
            pair = frozenset((e.u, e.v))
            if pair in seen_pairs or e.id in emap:
                raise DuplicateEdgeError(
                    f"edge {e.id} repeats pair ({e.u}, {e.v}) or its id")
            seen_pairs.add(pair)
            emap[e.id] = e

        adjacency = {vid: [] for vid in vmap}
        for e in emap.values():
            adjacency[e.u].append((e.id, e.v, e.length))
            adjacency[e.v].append((e.id, e.u, e.length))
        for vid in adjacency:
            adjacency[vid] = tuple(adjacency[vid])

        # connectivity (BFS from an arbitrary vertex)
        start = next(iter(vmap))
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for _, other, _ in adjacency[cur]:
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        if len(seen) != len(vmap):
            missing = sorted(set(vmap) - seen)
            raise DisconnectedGraphError(
                f"vertices unreachable from vertex {start}: {missing}")

        self._vertices = vmap
        self._edges = emap
        self._adjacency = adjacency
        self._vorder = tuple(sorted(vmap))
        self._eorder = tuple(sorted(emap))
        self._content_key = (
            tuple((v.id, v.x, v.y) for v in
                  (vmap[i] for i in self._vorder)),
            tuple((e.id, e.u, e.v, e.length) for e in
                  (emap[i] for i in self._eorder)),
        )

    # -- read-only views ---------------------------------------------------

    @property
    def vertex_ids(self):
        return self._vorder

    @property
    def edge_ids(self):
        return self._eorder

    @property
    def n_vertices(self) -> int:
        return len(self._vertices)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def vertex(self, vid: int) -> Vertex:
        return self._vertices[vid]

    def edge(self, eid: int) -> Edge:
        return self._edges[eid]

    def neighbors(self, vid: int):
        """Tuples (edge_id, other_vertex_id, length) incident to ``vid``."""
        return self._adjacency[vid]

    def degree(self, vid: int) -> int:
        return len(self._adjacency[vid])

    @property
    def total_length(self) -> float:
        return float(sum(e.length for e in self._edges.values()))

    @property
    def content_key(self):
        """Hashable token identifying the network content (cache key)."""
        return self._content_key

    def has_coords(self) -> bool:
        return all(v.coords is not None for v in self._vertices.values())

    # -- validated point factories ----------------------------------------

    def point_at_vertex(self, vid: int) -> PointOnNetwork:
        if vid not in self._vertices:
            raise InvalidParamsError(f"no vertex with id {vid}")
        return PointOnNetwork("vertex", vid)

    def point_on_edge(self, eid: int, offset: float) -> PointOnNetwork:
        """Interior edge point.  Offsets 0 and length are rejected: vertex
        locations must be supplied in the vertex form."""
        if eid not in self._edges:
            raise InvalidParamsError(f"no edge with id {eid}")
        length = self._edges[eid].length
        if not (0.0 < offset < length):
            raise InvalidParamsError(
                f"offset {offset} not in the open interval (0, {length}) "
                f"for edge {eid}; endpoint locations must use the vertex form")
        return PointOnNetwork("edge", eid, float(offset))

    def point_coords(self, p: PointOnNetwork):
        """Planar coordinates of a point (linear interpolation on edges)."""
        if p.is_vertex:
            return self._vertices[p.ref].coords
        e = self._edges[p.ref]
        cu = self._vertices[e.u].coords
        cv = self._vertices[e.v].coords
        if cu is None or cv is None:
            return None
        t = p.offset / e.length
        return (cu[0] + t * (cv[0] - cu[0]), cu[1] + t * (cv[1] - cu[1]))

    def __repr__(self):
        return (f"Network(n_vertices={self.n_vertices}, "
                f"n_edges={self.n_edges})")


def build_network(vertices, edges) -> Network:
    """Build and validate an immutable :class:`Network`.

    Parameters
    ----------
    vertices : iterable of Vertex or (id,) / (id, x, y) tuples
    edges : iterable of Edge or (id, u, v, length) tuples

    Raises
    ------
    SelfLoopError, DanglingEndpointError, NonPositiveLengthError,
    DuplicateEdgeError, DisconnectedGraphError, InvalidParamsError
        Exactly one named error per malformed-input case.
    """
    return Network(vertices, edges)


# ---------------------------------------------------------------------------
# vertex-level shortest paths (used by the consistency check and diameter)
# ---------------------------------------------------------------------------

def _vertex_csr(net: Network):
    vindex = {vid: i for i, vid in enumerate(net.vertex_ids)}
    rows, cols, vals = [], [], []
    for eid in net.edge_ids:
        e = net.edge(eid)
        i, j = vindex[e.u], vindex[e.v]
        rows += [i, j]
        cols += [j, i]
        vals += [e.length, e.length]
    n = net.n_vertices
    return csr_matrix((vals, (rows, cols)), shape=(n, n)), vindex


def vertex_distances(net: Network) -> np.ndarray:
    """All-pairs shortest-path distances between vertices (dense matrix in
    vertex_ids order)."""
    graph, _ = _vertex_csr(net)
    return _csgraph_dijkstra(graph, directed=False)


def network_diameter(net: Network) -> float:
    """Largest shortest-path distance between any two vertices."""
    return float(vertex_distances(net).max())


def check_distance_consistency(net: Network) -> list:
    """Edges that are not themselves shortest paths between their endpoints.

    Returns every edge id whose endpoints admit a strictly shorter path
    through the rest of the network (relative tolerance 1e-12).  An empty
    list means the network is distance-consistent and the geodesic metric
    is usable.
    """
    dist = vertex_distances(net)
    _, vindex = _vertex_csr(net)
    bad = []
    for eid in net.edge_ids:
        e = net.edge(eid)
        if dist[vindex[e.u], vindex[e.v]] < e.length * (1.0 - CONSISTENCY_RTOL):
            bad.append(eid)
    return bad


# ---------------------------------------------------------------------------
# topology classification
# ---------------------------------------------------------------------------

def _biconnected_edge_blocks(net: Network):
    """Iterative Hopcroft-Tarjan; yields blocks as lists of edge ids."""
    visited = set()
    depth = {}
    low = {}
    parent_edge = {}
    blocks = []
    edge_stack = []

    for root in net.vertex_ids:
        if root in visited:
            continue
        stack = [(root, iter(net.neighbors(root)))]
        visited.add(root)
        depth[root] = 0
        low[root] = 0
        parent_edge[root] = None
        while stack:
            v, it = stack[-1]
            advanced = False
            for eid, w, _ in it:
                if eid == parent_edge[v]:
                    continue
                if w not in visited:
                    edge_stack.append(eid)
                    visited.add(w)
                    depth[w] = depth[v] + 1
                    low[w] = depth[w]
                    parent_edge[w] = eid
                    stack.append((w, iter(net.neighbors(w))))
                    advanced = True
                    break
                elif depth[w] < depth[v]:
                    # back edge
                    edge_stack.append(eid)
                    low[v] = min(low[v], depth[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= depth[u]:
                    # u is an articulation point (or root); pop one block
                    block = []
                    while True:
                        eid = edge_stack.pop()
                        block.append(eid)
                        if eid == parent_edge[v]:
                            break
                    blocks.append(block)
    return blocks


def classify_topology(net: Network) -> TopologyClass:
    """Classify a network for kernel-validity purposes.

    Acyclic networks are Euclidean trees (with their exact leaf count).
    Otherwise the biconnected blocks are inspected: if every block is a
    single edge or a simple cycle the network is a 1-sum of cycles and
    trees; anything else (e.g. a theta graph) is general.
    """
    if net.n_edges == net.n_vertices - 1:
        leaves = sum(1 for vid in net.vertex_ids if net.degree(vid) == 1)
        return TopologyClass(TREE, leaf_count=leaves)
    for block in _biconnected_edge_blocks(net):
        if len(block) == 1:
            continue
        verts = set()
        for eid in block:
            e = net.edge(eid)
            verts.update((e.u, e.v))
        if len(block) != len(verts):
            return TopologyClass(GENERAL)
        deg = {v: 0 for v in verts}
        for eid in block:
            e = net.edge(eid)
            deg[e.u] += 1
            deg[e.v] += 1
        if any(d != 2 for d in deg.values()):
            return TopologyClass(GENERAL)
    return TopologyClass(CYCLES_AND_TREES)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

GENERATOR_KINDS = ("path", "cycle", "star", "random_tree", "river_tree",
                   "cycle_with_pendant_trees")


def generate(kind: str, params: Optional[dict] = None, seed: int = 0) -> Network:
    """Generate a test network; a pure function of (kind, params, seed).

    Supported kinds and params (all optional unless noted):

    - ``path``: ``n`` vertices (required), ``length`` per edge (default 1.0)
    - ``cycle``: ``n`` vertices (required), ``length`` per edge (default 1.0)
    - ``star``: ``leaves`` spokes (required), ``length`` per spoke (default 1.0)
    - ``random_tree``: ``n`` vertices (required), ``length_range`` (lo, hi)
      (default (0.5, 1.5))
    - ``river_tree``: ``depth`` (default 5), ``base_length`` (default 40.0),
      ``decay`` (default 0.7), ``branch_prob`` (default 0.85),
      ``detour_range`` (default (1.15, 1.35))
    - ``cycle_with_pendant_trees``: ``cycle_n`` (default 6),
      ``tree_depth`` (default 2), ``length`` (default 1.0)

    Every generated network embeds its vertices in the plane with edge
    length >= the chord between its endpoints, so the ambient-Euclidean
    metric never exceeds the network metrics.
    """
    params = dict(params or {})
    if kind not in GENERATOR_KINDS:
        raise InvalidParamsError(
            f"unknown generator kind {kind!r}; expected one of {GENERATOR_KINDS}")
    rng = np.random.default_rng(seed)
    builder = {
        "path": _gen_path,
        "cycle": _gen_cycle,
        "star": _gen_star,
        "random_tree": _gen_random_tree,
        "river_tree": _gen_river_tree,
        "cycle_with_pendant_trees": _gen_cycle_pendants,
    }[kind]
    try:
        return builder(params, rng)
    except KeyError as exc:
        raise InvalidParamsError(
            f"generator {kind!r} missing required param {exc}") from exc


def _require_int(params, key, minimum):
    val = params.get(key)
    if val is None:
        raise InvalidParamsError(f"param {key!r} is required")
    val = int(val)
    if val < minimum:
        raise InvalidParamsError(f"param {key!r} must be >= {minimum}")
    return val


def _gen_path(params, rng):
    n = _require_int(params, "n", 2)
    length = float(params.get("length", 1.0))
    verts = [Vertex(i, x=i * length, y=0.0) for i in range(n)]
    edges = [Edge(i, i, i + 1, length) for i in range(n - 1)]
    return Network(verts, edges)


def _gen_cycle(params, rng):
    n = _require_int(params, "n", 3)
    length = float(params.get("length", 1.0))
    radius = length / (2.0 * math.sin(math.pi / n))
    verts = [Vertex(i,
                    x=radius * math.cos(2 * math.pi * i / n),
                    y=radius * math.sin(2 * math.pi * i / n))
             for i in range(n)]
    edges = [Edge(i, i, (i + 1) % n, length) for i in range(n)]
    return Network(verts, edges)


def _gen_star(params, rng):
    leaves = _require_int(params, "leaves", 1)
    length = float(params.get("length", 1.0))
    verts = [Vertex(0, x=0.0, y=0.0)]
    edges = []
    for k in range(leaves):
        ang = 2 * math.pi * k / leaves
        verts.append(Vertex(k + 1, x=length * math.cos(ang),
                            y=length * math.sin(ang)))
        edges.append(Edge(k, 0, k + 1, length))
    return Network(verts, edges)


def _gen_random_tree(params, rng):
    n = _require_int(params, "n", 1)
    lo, hi = params.get("length_range", (0.5, 1.5))
    verts = [Vertex(0, x=0.0, y=0.0)]
    edges = []
    for i in range(1, n):
        parent = int(rng.integers(0, i))
        length = float(rng.uniform(lo, hi))
        ang = float(rng.uniform(0, 2 * math.pi))
        px, py = verts[parent].x, verts[parent].y
        verts.append(Vertex(i, x=px + length * math.cos(ang),
                            y=py + length * math.sin(ang)))
        edges.append(Edge(i - 1, parent, i, length))
    return Network(verts, edges)


def _gen_river_tree(params, rng):
    """Binary-branching tree with edge lengths decreasing toward the leaves,
    embedded with a winding-channel detour factor (length = chord * detour)."""
    depth = int(params.get("depth", 5))
    base = float(params.get("base_length", 40.0))
    decay = float(params.get("decay", 0.7))
    branch_prob = float(params.get("branch_prob", 0.85))
    detour_lo, detour_hi = params.get("detour_range", (1.15, 1.35))
    if depth < 1 or base <= 0 or not (0 < decay <= 1) or detour_lo < 1.0:
        raise InvalidParamsError("river_tree params out of range")

    verts = [Vertex(0, x=0.0, y=0.0)]
    edges = []
    next_vid = [1]
    next_eid = [0]

    def grow(parent_vid, px, py, direction, level):
        if level >= depth:
            return
        # always split at the first two levels so the tree actually spreads
        n_children = 2 if (level < 2 or rng.random() < branch_prob) else 1
        if n_children == 2:
            turns = (-rng.uniform(0.35, 0.7), rng.uniform(0.35, 0.7))
        else:
            turns = (rng.uniform(-0.12, 0.12),)
        for turn in turns:
            step = base * decay ** level * (1.0 + rng.uniform(-0.15, 0.15))
            ang = direction + turn
            cx = px + step * math.cos(ang)
            cy = py + step * math.sin(ang)
            detour = rng.uniform(detour_lo, detour_hi)
            vid = next_vid[0]
            next_vid[0] += 1
            verts.append(Vertex(vid, x=cx, y=cy))
            edges.append(Edge(next_eid[0], parent_vid, vid, step * detour))
            next_eid[0] += 1
            grow(vid, cx, cy, ang, level + 1)

    grow(0, 0.0, 0.0, math.pi / 2, 0)
    return Network(verts, edges)


def _gen_cycle_pendants(params, rng):
    cycle_n = int(params.get("cycle_n", 6))
    tree_depth = int(params.get("tree_depth", 2))
    length = float(params.get("length", 1.0))
    if cycle_n < 3 or tree_depth < 0:
        raise InvalidParamsError("cycle_with_pendant_trees params out of range")
    radius = length / (2.0 * math.sin(math.pi / cycle_n))
    verts = []
    edges = []
    for i in range(cycle_n):
        ang = 2 * math.pi * i / cycle_n
        verts.append(Vertex(i, x=radius * math.cos(ang),
                            y=radius * math.sin(ang)))
        edges.append(Edge(i, i, (i + 1) % cycle_n, length))
    next_vid = [cycle_n]
    next_eid = [cycle_n]

    def grow(parent, px, py, direction, level):
        if level >= tree_depth:
            return
        step = length * (0.8 ** (level + 1))
        for turn in (-0.5, 0.5):
            ang = direction + turn + rng.uniform(-0.1, 0.1)
            cx = px + step * math.cos(ang)
            cy = py + step * math.sin(ang)
            vid = next_vid[0]
            next_vid[0] += 1
            verts.append(Vertex(vid, x=cx, y=cy))
            edges.append(Edge(next_eid[0], parent, vid, step))
            next_eid[0] += 1
            grow(vid, cx, cy, ang, level + 1)

    for i in range(0, cycle_n, 2):
        v = verts[i]
        grow(i, v.x, v.y, math.atan2(v.y, v.x), 0)
    return Network(verts, edges)


def sample_points(net: Network, n: int, seed: int = 0):
    """Sample ``n`` points uniformly by length measure over the edges.

    Deterministic for a fixed seed; returns interior edge points (a draw
    landing exactly on a vertex has probability zero and is nudged inward).
    """
    if n < 1:
        raise InvalidParamsError("n must be >= 1")
    rng = np.random.default_rng(seed)
    eids = net.edge_ids
    lengths = np.array([net.edge(eid).length for eid in eids])
    weights = lengths / lengths.sum()
    points = []
    for _ in range(n):
        idx = int(rng.choice(len(eids), p=weights))
        frac = float(rng.random())
        if frac == 0.0:
            frac = 0.5
        points.append(PointOnNetwork("edge", eids[idx],
                                     float(frac * lengths[idx])))
    return points


# ---------------------------------------------------------------------------
# file IO
# ---------------------------------------------------------------------------

_VERTEX_KEYS = {"id", "x", "y"}
_EDGE_KEYS = {"id", "u", "v", "length"}


def network_from_json(obj, source: str = "<network>") -> Network:
    """Parse {"vertices": [...], "edges": [...]} into a Network."""
    if not isinstance(obj, dict) or set(obj) != {"vertices", "edges"}:
        raise FileFormatError(
            f"{source}: expected exactly the keys 'vertices' and 'edges'")
    verts = []
    for i, v in enumerate(obj["vertices"]):
        if not isinstance(v, dict) or not set(v) <= _VERTEX_KEYS or "id" not in v:
            raise FileFormatError(
                f"{source}: vertex entry {i} must have keys from "
                f"{sorted(_VERTEX_KEYS)} including 'id'")
        if not isinstance(v["id"], int):
            raise FileFormatError(f"{source}: vertex entry {i}: id must be an integer")
        x = v.get("x")
        y = v.get("y")
        if (x is None) != (y is None):
            raise FileFormatError(
                f"{source}: vertex {v['id']}: provide both x and y or neither")
        verts.append(Vertex(v["id"],
                            None if x is None else float(x),
                            None if y is None else float(y)))
    edges = []
    for i, e in enumerate(obj["edges"]):
        if not isinstance(e, dict) or set(e) != _EDGE_KEYS:
            raise FileFormatError(
                f"{source}: edge entry {i} must have exactly keys "
                f"{sorted(_EDGE_KEYS)}")
        if not all(isinstance(e[k], int) for k in ("id", "u", "v")):
            raise FileFormatError(
                f"{source}: edge entry {i}: id, u, v must be integers")
        edges.append(Edge(e["id"], e["u"], e["v"], float(e["length"])))
    return build_network(verts, edges)


def load_network(path) -> Network:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return network_from_json(obj, source=str(path))


def network_to_json(net: Network) -> dict:
    verts = []
    for vid in net.vertex_ids:
        v = net.vertex(vid)
        entry = {"id": v.id}
        if v.coords is not None:
            entry["x"] = v.x
            entry["y"] = v.y
        verts.append(entry)
    edges = [{"id": e.id, "u": e.u, "v": e.v, "length": e.length}
             for e in (net.edge(eid) for eid in net.edge_ids)]
    return {"vertices": verts, "edges": edges}


def save_network(net: Network, path) -> None:
    with open(path, "w") as fh:
        json.dump(network_to_json(net), fh, indent=1)
        fh.write("\n")


POINTS_HEADER = ["point_id", "kind", "ref_id", "offset"]


def load_points(net: Network, path):
    """Read a points CSV (header point_id,kind,ref_id,offset).

    Returns (ids, points).  Violations are reported with the offending line
    number; vertex rows must leave offset empty, edge rows need an offset
    strictly inside (0, length).
    """
    ids = []
    points = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}: empty file; header required")
        if [h.strip() for h in header] != POINTS_HEADER:
            raise FileFormatError(
                f"{path}: line 1: header must be {','.join(POINTS_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise FileFormatError(f"{path}: line {lineno}: expected 4 fields")
            pid, kind, ref, off = (c.strip() for c in row)
            kind = kind.lower()
            try:
                ref = int(ref)
            except ValueError:
                raise FileFormatError(
                    f"{path}: line {lineno}: ref_id must be an integer")
            try:
                if kind == "vertex":
                    if off != "":
                        raise FileFormatError(
                            f"{path}: line {lineno}: vertex rows take no offset")
                    points.append(net.point_at_vertex(ref))
                elif kind == "edge":
                    points.append(net.point_on_edge(ref, float(off)))
                else:
                    raise FileFormatError(
                        f"{path}: line {lineno}: kind must be 'vertex' or 'edge'")
            except InvalidParamsError as exc:
                raise FileFormatError(f"{path}: line {lineno}: {exc}") from exc
            except ValueError as exc:
                raise FileFormatError(
                    f"{path}: line {lineno}: bad offset {off!r}") from exc
            ids.append(pid)
    return ids, points


def save_points(ids: Sequence[str], points: Sequence[PointOnNetwork], path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(POINTS_HEADER)
        for pid, p in zip(ids, points):
            if p.is_vertex:
                writer.writerow([pid, "vertex", p.ref, ""])
            else:
                writer.writerow([pid, "edge", p.ref, repr(float(p.offset))])
