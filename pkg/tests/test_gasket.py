import numpy as np
import pytest

from gasketwalk import (
    PERIODIC,
    REFLECTIVE,
    GasketSpec,
    contains,
    direction_set,
    vertex_count,
)


def test_vertex_count_formula():
    assert [vertex_count(g) for g in range(9)] == [3, 6, 15, 42, 123, 366, 1095, 3282, 9843]


def test_spec_validation():
    with pytest.raises(ValueError):
        GasketSpec(-1, PERIODIC)
    with pytest.raises(ValueError):
        GasketSpec(2, "wrapped")


def test_g0_is_single_triangle(graph_of):
    graph = graph_of(0, REFLECTIVE)
    assert graph.num_vertices == 3
    assert {tuple(v) for v in graph.xy} == {(0, 0), (2, 0), (1, 1)}
    assert len(graph.geometric_edges) == 3


def test_g1_vertices_and_corner_degrees(graph_of):
    refl = graph_of(1, REFLECTIVE)
    assert {tuple(v) for v in refl.xy} == {(0, 0), (2, 0), (4, 0), (1, 1), (3, 1), (2, 2)}
    for c in ((0, 0), (2, 2), (4, 0)):
        assert refl.degrees[refl.index_of(c)] == 2
    peri = graph_of(1, PERIODIC)
    for c in ((0, 0), (2, 2), (4, 0)):
        assert peri.degrees[peri.index_of(c)] == 4


def test_g2_counts(graph_of):
    graph = graph_of(2, REFLECTIVE)
    assert graph.num_vertices == 15
    assert len(graph.geometric_edges) == 27


@pytest.mark.parametrize("g", range(6))
@pytest.mark.parametrize("bc", [PERIODIC, REFLECTIVE])
def test_counts_and_ports(graph_of, g, bc):
    graph = graph_of(g, bc)
    assert graph.num_vertices == vertex_count(g)
    expected_ports = 4 * graph.num_vertices - (0 if bc == PERIODIC else 6)
    assert graph.port_count == expected_ports
    assert len(graph.geometric_edges) == 3 ** (g + 1)
    assert graph.num_edges == 3 ** (g + 1) + (3 if bc == PERIODIC else 0)


def test_contains_examples():
    assert contains(2, 0, 0)
    assert not contains(2, 3, 2)  # the y=2 row holds x in {2, 4, 6} only
    assert contains(2, 5, 1)
    assert not contains(2, -1, 0)
    assert not contains(2, 9, 0)
    assert not contains(0, 1, 0)


@pytest.mark.parametrize("g", range(4))
def test_contains_agrees_with_generation(graph_of, g):
    # Brute force: filter the whole bounding grid through the predicate.
    graph = graph_of(g, REFLECTIVE)
    generated = {tuple(v) for v in graph.xy}
    filtered = {
        (x, y)
        for x in range(2 ** (g + 1) + 1)
        for y in range(2 ** g + 1)
        if contains(g, x, y)
    }
    assert filtered == generated


def test_direction_set_examples(graph_of):
    graph = graph_of(2, REFLECTIVE)
    assert direction_set(graph, (2, 0)) == {0, 1, 2, 3}
    assert direction_set(graph, (1, 1)) == {0, 1, 4, 5}
    assert direction_set(graph, (6, 2)) == {2, 3, 4, 5}


def test_direction_set_corners_by_boundary(graph_of):
    refl = graph_of(2, REFLECTIVE)
    assert direction_set(refl, (0, 0)) == {3, 4}
    assert direction_set(refl, (4, 4)) == {1, 2}
    assert direction_set(refl, (8, 0)) == {0, 5}
    peri = graph_of(2, PERIODIC)
    assert direction_set(peri, (0, 0)) == {0, 1, 3, 4}
    assert direction_set(peri, (4, 4)) == {1, 2, 4, 5}
    assert direction_set(peri, (8, 0)) == {0, 2, 3, 5}


def test_direction_set_unknown_vertex(graph_of):
    graph = graph_of(2, REFLECTIVE)
    with pytest.raises(ValueError):
        direction_set(graph, (3, 2))


@pytest.mark.parametrize("g", range(5))
@pytest.mark.parametrize("bc", [PERIODIC, REFLECTIVE])
def test_adjacency_symmetry(graph_of, g, bc):
    graph = graph_of(g, bc)
    for i in range(graph.num_vertices):
        for k in range(6):
            if graph.dirmask[i, k]:
                j = graph.nbr_vertex[i, k]
                k2 = graph.nbr_port[i, k]
                assert graph.dirmask[j, k2]
                assert graph.nbr_vertex[j, k2] == i
                assert graph.nbr_port[j, k2] == k


@pytest.mark.parametrize("g", range(1, 5))
def test_internal_direction_sets_are_wedge_unions(graph_of, g):
    graph = graph_of(g, REFLECTIVE)
    wedges = [{0, 1}, {2, 3}, {4, 5}]
    allowed = [set().union(a, b) for i, a in enumerate(wedges) for b in wedges[i + 1 :]]
    for i in range(graph.num_vertices):
        if i in graph.corners:
            continue
        dirs = set(np.nonzero(graph.dirmask[i])[0].tolist())
        assert dirs in allowed, tuple(graph.xy[i])


def test_geometric_degrees(graph_of):
    # Every vertex has geometric degree 4 except the three degree-2 corners.
    graph = graph_of(3, REFLECTIVE)
    deg = np.zeros(graph.num_vertices, dtype=int)
    for u, v in graph.geometric_edges:
        deg[u] += 1
        deg[v] += 1
    corner_set = set(graph.corners)
    for i in range(graph.num_vertices):
        assert deg[i] == (2 if i in corner_set else 4)


def test_vertex_ordering_is_y_then_x(graph_of):
    graph = graph_of(3, PERIODIC)
    keys = [(int(y), int(x)) for x, y in graph.xy]
    assert keys == sorted(keys)


def test_distances_from(graph_of):
    graph = graph_of(2, REFLECTIVE)
    dist = graph.distances_from((4, 0))
    assert dist[graph.index_of((4, 0))] == 0
    assert dist[graph.index_of((2, 0))] == 1
    assert (dist >= 0).all()
    # periodic wraps shorten corner-to-corner hops to 1
    peri = graph_of(2, PERIODIC)
    dp = peri.distances_from((0, 0))
    assert dp[peri.index_of((8, 0))] == 1


def test_adjacency_dump_rows(graph_of):
    graph = graph_of(1, REFLECTIVE)
    rows = graph.adjacency_rows()
    assert len(rows) == graph.port_count
    assert (2, 0, 1, 3, 1, 4) in rows


def test_adjacency_csv(tmp_path, graph_of):
    from gasketwalk.gasket import write_adjacency_csv

    graph = graph_of(1, PERIODIC)
    path = tmp_path / "adjacency.csv"
    write_adjacency_csv(path, graph)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,k,nx,ny,k_arr"
    assert len(lines) == 1 + graph.port_count
    assert "0,0,3,4,0,0" in lines  # periodic wrap from (0,0) to (4,0)
