"""Flip-flop shift permutation and Grover coin for gasket walks.

The coin space uses six direction labels k = 0..5 laid out around a vertex;
each vertex only uses the labels of edges it actually has.  The shift is an
involution on (vertex, direction) ports, the coin acts block-diagonally with
one Grover reflection per vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "DirectionTable",
    "DIRECTIONS",
    "DX",
    "DY",
    "opposite",
    "ShiftPermutation",
    "build_shift",
    "CoinOperator",
    "build_coin",
    "coin_matrix",
    "apply_coin",
    "apply_shift",
    "CorruptStateError",
]

# Displacement of each direction label on the integer half-grid.
DX = (2, 1, -1, -2, -1, 1)
DY = (0, 1, 1, 0, -1, -1)


def opposite(k):
    """Direction label of the reversed edge: k -> (k + 3) mod 6."""
    return (k + 3) % 6


@dataclass(frozen=True)
class DirectionTable:
    """Auxiliary displacement functions for the six direction labels.

    ``dx[opposite(k)] == -dx[k]`` and ``dy[opposite(k)] == -dy[k]`` hold for
    every label, so following a direction and its opposite returns to the
    starting vertex.
    """

    dx: tuple = DX
    dy: tuple = DY

    def displacement(self, k):
        return self.dx[k], self.dy[k]

    def opposite(self, k):
        return opposite(k)


DIRECTIONS = DirectionTable()

# Inverse lookup: displacement vector -> direction label.
_DISP_TO_DIR = {(DX[k], DY[k]): k for k in range(6)}


def direction_between(u, v):
    """Direction label whose displacement carries vertex u onto vertex v.

    Raises KeyError when v is not one displacement step away from u.
    """
    return _DISP_TO_DIR[(v[0] - u[0], v[1] - u[1])]


def periodic_wrap_pairs(generation):
    """The three corner-to-corner wrap transpositions of the periodic shift.

    Each entry is ``((vertex, port), (vertex, port))``.  Outgoing and arrival
    labels are opposite mod 6, exactly as on interior edges, which is what
    makes the periodic shift a single uniform rule.
    """
    top = (2 ** generation, 2 ** generation)
    right = (2 ** (generation + 1), 0)
    return [
        (((0, 0), 3), (right, 0)),
        (((0, 0), 4), (top, 1)),
        ((top, 2), (right, 5)),
    ]


def reflective_corner_ports(generation):
    """Reflective corner port labels, keyed by corner then by neighbor.

    Each corner keeps exactly two ports, labelled with the outgoing coin
    values of the bounce rules; the label is bound to the incident edge
    towards the stated neighbor.  Corner coins are then 2x2 Grover blocks.
    """
    s = 2 ** generation
    top = (s, s)
    right = (2 * s, 0)
    return {
        (0, 0): {(1, 1): 3, (2, 0): 4},
        top: {(s - 1, s - 1): 1, (s + 1, s - 1): 2},
        right: {(2 * s - 1, 1): 0, (2 * s - 2, 0): 5},
    }


class CorruptStateError(ValueError):
    """A walker state carries amplitude on a port its vertex does not have."""


@dataclass(frozen=True)
class ShiftPermutation:
    """Flip-flop shift as a flat involution over the 6 slots of every vertex.

    ``forward[6*v + k]`` is the flat slot the amplitude at port (v, k) moves
    to; slots of invalid ports map to themselves (their amplitude is pinned
    to zero).  ``port_count`` counts valid ports only.
    """

    forward: np.ndarray
    port_count: int

    def is_involution(self):
        f = self.forward
        return bool(np.array_equal(f[f], np.arange(f.size)))

    def transpositions(self):
        """Distinct port pairs (flat indices), one per undirected edge."""
        f = self.forward
        idx = np.arange(f.size)
        moved = f != idx
        lo = idx[moved & (idx < f)]
        return [(int(i), int(f[i])) for i in lo]

    def pair_rows(self, graph):
        """Debug dump: one ``x,y,k,nx,ny,k_arr`` row per directed valid port."""
        rows = []
        for i, j in self.transpositions():
            for a, b in ((i, j), (j, i)):
                (x, y), k = graph.xy[a // 6], a % 6
                (nx_, ny_), k2 = graph.xy[b // 6], b % 6
                rows.append((int(x), int(y), k, int(nx_), int(ny_), k2))
        rows.sort()
        return rows


def build_shift(graph):
    """Build the shift involution from the graph's wired neighbor tables.

    Interior ports follow ``(v, k) -> (v + d_k, opposite(k))``; corner ports
    follow the boundary rules already wired into the graph.  The result is a
    product of disjoint transpositions, one per undirected edge.
    """
    n = graph.num_vertices
    forward = np.arange(6 * n, dtype=np.int64)
    valid = graph.dirmask.reshape(-1)
    target = (6 * graph.nbr_vertex.astype(np.int64) + graph.nbr_port).reshape(-1)
    forward[valid] = target[valid]
    perm = ShiftPermutation(forward=forward, port_count=int(valid.sum()))
    if not perm.is_involution():
        raise AssertionError("shift permutation failed to close into an involution")
    return perm


def coin_matrix(degree):
    """Grover reflection (2/d) J - I for a vertex of the given degree.

    Only degrees 2 and 4 occur on the gasket; anything else is rejected.
    For d = 4 this is the matrix with -1/2 on the diagonal and +1/2 off it;
    for d = 2 it degenerates to the swap matrix.
    """
    if degree not in (2, 4):
        raise ValueError(f"no Grover coin for degree {degree}; gasket vertices have degree 2 or 4")
    return np.full((degree, degree), 2.0 / degree) - np.eye(degree)


@dataclass(frozen=True)
class CoinOperator:
    """Block-diagonal Grover coin over a graph's valid ports.

    ``gainmask[v, k]`` equals 2/deg(v) on valid ports and 0 elsewhere, so a
    coin application is ``gainmask * rowsum - amplitudes`` in one sweep.
    """

    gainmask: np.ndarray
    dirmask: np.ndarray

    def block(self, degree):
        return coin_matrix(degree)

    def apply(self, state):
        _check_valid_support(state.graph, state.amplitudes)
        a = state.amplitudes
        s = a.sum(axis=1)
        out = self.gainmask * s[:, None] - a
        return replace(state, amplitudes=out)


def build_coin(graph):
    return CoinOperator(gainmask=graph.coin_gainmask, dirmask=graph.dirmask)


def _check_valid_support(graph, amplitudes):
    if np.any(amplitudes[~graph.dirmask] != 0):
        bad = np.argwhere((amplitudes != 0) & ~graph.dirmask)[0]
        v = tuple(int(c) for c in graph.xy[bad[0]])
        raise CorruptStateError(f"nonzero amplitude on invalid port {v} direction {int(bad[1])}")


def apply_coin(graph, state):
    """Apply the per-vertex Grover blocks to a walker state.

    Uniform vectors over a vertex's ports are fixed points; the operation is
    norm preserving and leaves invalid ports at exactly zero.
    """
    return build_coin(graph).apply(state)


def apply_shift(perm, state):
    """Move every amplitude along its port's edge (exact permutation)."""
    graph = state.graph
    _check_valid_support(graph, state.amplitudes)
    flat = state.amplitudes.reshape(-1)
    out = flat[perm.forward].reshape(state.amplitudes.shape)
    return replace(state, amplitudes=out)
