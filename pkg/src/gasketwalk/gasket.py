"""Sierpinski gasket graphs on the integer half-grid.

A generation-g gasket spans corners (0,0), (2^{g+1},0) and (2^g,2^g) and has
N = 3(3^g+1)/2 vertices.  Two vertices are adjacent exactly when they are
corners of the same smallest (generation-0) triangle, which reproduces the
standard picture of the fractal drawn with unit up-triangles.

The graph object also wires the three outer corners for a chosen boundary
condition, so that the per-vertex direction sets and the neighbor tables are
exactly the ports the walk dynamics uses.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .coinshift import (
    direction_between,
    periodic_wrap_pairs,
    reflective_corner_ports,
)

__all__ = [
    "PERIODIC",
    "REFLECTIVE",
    "GasketSpec",
    "GasketGraph",
    "build_gasket",
    "contains",
    "direction_set",
    "vertex_count",
]

PERIODIC = "periodic"
REFLECTIVE = "reflective"
_BOUNDARIES = (PERIODIC, REFLECTIVE)

# Internal degree-4 direction sets come in three orientations, each the
# union of two of the wedges {0,1}, {2,3}, {4,5}.
_INTERNAL_DIRECTION_SETS = (
    frozenset({0, 1, 2, 3}),
    frozenset({0, 1, 4, 5}),
    frozenset({2, 3, 4, 5}),
)


def vertex_count(generation):
    """Closed-form vertex count 3(3^g + 1)/2."""
    return 3 * (3 ** generation + 1) // 2


@dataclass(frozen=True)
class GasketSpec:
    """Generation and boundary condition of a gasket walk graph."""

    generation: int
    boundary: str = REFLECTIVE

    def __post_init__(self):
        if self.generation < 0:
            raise ValueError(f"generation must be >= 0, got {self.generation}")
        if self.boundary not in _BOUNDARIES:
            raise ValueError(f"boundary must be one of {_BOUNDARIES}, got {self.boundary!r}")


def _leaf_anchors(generation, ax=0, ay=0):
    """Anchors (lower-left corners) of all 3^g smallest triangles."""
    if generation == 0:
        yield ax, ay
        return
    half = 2 ** generation
    yield from _leaf_anchors(generation - 1, ax, ay)
    yield from _leaf_anchors(generation - 1, ax + half, ay)
    yield from _leaf_anchors(generation - 1, ax + half // 2, ay + half // 2)


def contains(generation, x, y):
    """Membership test for the generation-g gasket anchored at the origin.

    Defined by the recursive three-sub-gasket decomposition: the gasket of
    generation g is the union of three generation-(g-1) copies anchored at
    (0,0), (2^g,0) and (2^{g-1},2^{g-1}); the base case is the unit triangle
    {(0,0),(2,0),(1,1)}.  Out-of-range coordinates simply return False.
    """
    return _contains(generation, x, y, 0, 0)


def _contains(g, x, y, ax, ay):
    u, v = x - ax, y - ay
    if v < 0 or u < v or u > 2 ** (g + 1) - v:
        return False
    if g == 0:
        return (u, v) in ((0, 0), (2, 0), (1, 1))
    half = 2 ** g
    quarter = half // 2
    return (
        _contains(g - 1, x, y, ax, ay)
        or _contains(g - 1, x, y, ax + half, ay)
        or _contains(g - 1, x, y, ax + quarter, ay + quarter)
    )


class GasketGraph:
    """Immutable gasket graph with boundary-wired port tables.

    Vertices are ordered lexicographically by (y, x); all arrays and exports
    follow that order, which makes every downstream output byte-deterministic.

    Attributes
    ----------
    xy : (N, 2) int array of vertex coordinates.
    index : dict mapping (x, y) to the dense vertex index.
    dirmask : (N, 6) bool, valid direction labels per vertex.
    nbr_vertex, nbr_port : (N, 6) int, neighbor index and arrival label per
        valid port (-1 on invalid slots).
    corners : indices of ((0,0), (2^g,2^g), (2^{g+1},0)).
    """

    def __init__(self, spec, xy, dirmask, nbr_vertex, nbr_port, corners, geometric_edges):
        self.spec = spec
        self.xy = xy
        self.index = {(int(x), int(y)): i for i, (x, y) in enumerate(xy)}
        self.dirmask = dirmask
        self.nbr_vertex = nbr_vertex
        self.nbr_port = nbr_port
        self.corners = corners
        self.geometric_edges = geometric_edges
        self.degrees = dirmask.sum(axis=1).astype(np.int64)
        # 2/deg on valid slots, 0 elsewhere: the whole Grover coin in one array.
        with np.errstate(divide="ignore"):
            gain = np.where(self.degrees > 0, 2.0 / self.degrees, 0.0)
        self.coin_gainmask = gain[:, None] * dirmask
        # Compact enumeration of valid ports (vertex-major, direction ascending).
        flat_valid = dirmask.reshape(-1)
        self.port_index = np.where(flat_valid, np.cumsum(flat_valid) - 1, -1).reshape(dirmask.shape)
        self.vertex_of_port = np.nonzero(flat_valid)[0] // 6
        self.dir_of_port = np.nonzero(flat_valid)[0] % 6

    # -- basic queries -----------------------------------------------------

    @property
    def num_vertices(self):
        return int(self.xy.shape[0])

    @property
    def generation(self):
        return self.spec.generation

    @property
    def boundary(self):
        return self.spec.boundary

    @property
    def port_count(self):
        return int(self.vertex_of_port.size)

    @property
    def num_edges(self):
        return self.port_count // 2

    def index_of(self, v):
        try:
            return self.index[(int(v[0]), int(v[1]))]
        except KeyError:
            raise ValueError(f"vertex {tuple(v)} is not on the generation-{self.generation} gasket") from None

    def same_structure(self, other):
        return self.spec == other.spec and self.num_vertices == other.num_vertices

    def neighbors(self, v):
        """Neighbor coordinate list of v in direction-label order."""
        i = self.index_of(v)
        return [tuple(int(c) for c in self.xy[self.nbr_vertex[i, k]]) for k in range(6) if self.dirmask[i, k]]

    def distances_from(self, v):
        """BFS hop distances from v over the wired adjacency (wraps included)."""
        start = self.index_of(v)
        dist = np.full(self.num_vertices, -1, dtype=np.int64)
        dist[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for k in range(6):
                if self.dirmask[u, k]:
                    w = int(self.nbr_vertex[u, k])
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        queue.append(w)
        return dist

    def adjacency_rows(self):
        """Debug dump rows ``x,y,k,nx,ny,k_arr``, sorted by (y, x, k)."""
        rows = []
        for i in range(self.num_vertices):
            x, y = (int(c) for c in self.xy[i])
            for k in range(6):
                if self.dirmask[i, k]:
                    j = int(self.nbr_vertex[i, k])
                    nx_, ny_ = (int(c) for c in self.xy[j])
                    rows.append((x, y, k, nx_, ny_, int(self.nbr_port[i, k])))
        rows.sort(key=lambda r: (r[1], r[0], r[2]))
        return rows


def build_gasket(spec):
    """Construct the gasket graph for a spec, wiring the chosen boundary.

    Adjacency comes from the 3^g smallest triangles (3 edges each, no two
    triangles sharing an edge).  Under periodic boundary conditions the three
    corners are joined pairwise by wrap edges and every vertex ends up with
    degree 4; under reflective conditions the corners keep degree 2 with the
    bounce-rule port labels.
    """
    g = spec.generation
    triangles = [((ax, ay), (ax + 2, ay), (ax + 1, ay + 1)) for ax, ay in _leaf_anchors(g)]
    edges = set()
    verts = set()
    for a, b, c in triangles:
        verts.update((a, b, c))
        for u, v in ((a, b), (a, c), (b, c)):
            edges.add((u, v) if (u[1], u[0]) <= (v[1], v[0]) else (v, u))
    xy_sorted = sorted(verts, key=lambda p: (p[1], p[0]))
    n = len(xy_sorted)
    if n != vertex_count(g):
        raise AssertionError(f"vertex enumeration produced {n}, expected {vertex_count(g)}")
    index = {p: i for i, p in enumerate(xy_sorted)}
    geometric_edges = sorted((index[u], index[v]) if index[u] < index[v] else (index[v], index[u]) for u, v in edges)

    port_pairs = []
    if spec.boundary == PERIODIC:
        for u, v in edges:
            port_pairs.append(((u, direction_between(u, v)), (v, direction_between(v, u))))
        port_pairs.extend(periodic_wrap_pairs(g))
    else:
        special = reflective_corner_ports(g)

        def label(u, v):
            if u in special:
                return special[u][v]
            return direction_between(u, v)

        for u, v in edges:
            port_pairs.append(((u, label(u, v)), (v, label(v, u))))

    dirmask = np.zeros((n, 6), dtype=bool)
    nbr_vertex = np.full((n, 6), -1, dtype=np.int64)
    nbr_port = np.full((n, 6), -1, dtype=np.int64)
    for (u, ku), (v, kv) in port_pairs:
        ui, vi = index[u], index[v]
        for a, ka, b, kb in ((ui, ku, vi, kv), (vi, kv, ui, ku)):
            if dirmask[a, ka]:
                raise AssertionError(f"port {xy_sorted[a]} direction {ka} wired twice")
            dirmask[a, ka] = True
            nbr_vertex[a, ka] = b
            nbr_port[a, ka] = kb

    corners = tuple(index[c] for c in ((0, 0), (2 ** g, 2 ** g), (2 ** (g + 1), 0)))
    graph = GasketGraph(
        spec=spec,
        xy=np.array(xy_sorted, dtype=np.int64),
        dirmask=dirmask,
        nbr_vertex=nbr_vertex,
        nbr_port=nbr_port,
        corners=corners,
        geometric_edges=geometric_edges,
    )
    _validate(graph)
    return graph


def _validate(graph):
    g = graph.generation
    expected_ports = 4 * graph.num_vertices if graph.boundary == PERIODIC else 4 * graph.num_vertices - 6
    if graph.port_count != expected_ports:
        raise AssertionError(f"port count {graph.port_count}, expected {expected_ports}")
    corner_deg = 4 if graph.boundary == PERIODIC else 2
    for i in range(graph.num_vertices):
        want = corner_deg if i in graph.corners else 4
        if graph.degrees[i] != want:
            raise AssertionError(f"vertex {tuple(graph.xy[i])} has degree {graph.degrees[i]}, expected {want}")
        if i not in graph.corners:
            dirs = frozenset(np.nonzero(graph.dirmask[i])[0].tolist())
            if dirs not in _INTERNAL_DIRECTION_SETS:
                raise AssertionError(f"internal vertex {tuple(graph.xy[i])} has direction set {sorted(dirs)}")
    if len(graph.geometric_edges) != 3 ** (g + 1):
        raise AssertionError(f"{len(graph.geometric_edges)} geometric edges, expected {3 ** (g + 1)}")


def direction_set(graph, v):
    """Valid direction labels of v, including boundary-condition labels.

    For internal vertices these are exactly the k whose displacement reaches
    a neighbor across a smallest-triangle edge; corner vertices carry the
    wrap labels (periodic) or the bounce labels (reflective) instead.
    """
    i = graph.index_of(v)
    return set(int(k) for k in np.nonzero(graph.dirmask[i])[0])


def write_adjacency_csv(path, graph):
    """Debug export of the wired adjacency, one ``x,y,k,nx,ny,k_arr`` row per port."""
    with open(path, "w") as fh:
        fh.write("x,y,k,nx,ny,k_arr\n")
        for row in graph.adjacency_rows():
            fh.write(",".join(str(c) for c in row) + "\n")
