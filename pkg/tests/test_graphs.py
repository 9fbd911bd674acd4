from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from qcongest import graphs
from qcongest.graphs import (
    Graph,
    GraphError,
    bfs_distances,
    diameter_bruteforce,
    eccentricity,
    generate,
    read_edge_list,
    write_edge_list,
)


def floyd_warshall(g: Graph) -> list[list[int]]:
    inf = 10**9
    dist = [[inf] * g.n for _ in range(g.n)]
    for v in range(g.n):
        dist[v][v] = 0
    for u, v in g.edges():
        dist[u][v] = dist[v][u] = 1
    for k in range(g.n):
        for i in range(g.n):
            for j in range(g.n):
                if dist[i][k] + dist[k][j] < dist[i][j]:
                    dist[i][j] = dist[i][k] + dist[k][j]
    return dist


def matrix_power_distances(g: Graph, source: int) -> dict[int, int]:
    """Boolean adjacency powers: dist = first power reaching the node."""
    reach = {source}
    dist = {source: 0}
    for k in range(1, g.n):
        new = {v for u in reach for v in g.adj[u]} - reach
        if not new:
            break
        for v in new:
            dist[v] = k
        reach |= new
    return dist


seeded_graph = st.builds(
    lambda fam, n, seed: generate(fam, n, seed=seed, p=0.3 if fam == "random" else None),
    st.sampled_from(["path", "cycle", "grid", "lollipop", "random"]),
    st.integers(4, 24),
    st.integers(0, 50),
)


def test_bfs_on_small_path():
    g = graphs.path_graph(3)
    assert bfs_distances(g, 0) == {0: 0, 1: 1, 2: 2}


def test_bfs_distance_to_self_is_zero():
    g = generate("random", 10, seed=3, p=0.4)
    for u in range(g.n):
        assert bfs_distances(g, u)[u] == 0


@given(seeded_graph)
def test_bfs_matches_matrix_powers(g):
    for u in range(g.n):
        assert bfs_distances(g, u) == matrix_power_distances(g, u)


def test_star_eccentricities():
    g = graphs.star_graph(5)  # K_{1,4}
    assert eccentricity(g, 0) == 1
    assert all(eccentricity(g, leaf) == 2 for leaf in range(1, 5))


@given(seeded_graph)
def test_eccentricity_matches_floyd_warshall(g):
    dist = floyd_warshall(g)
    for u in range(g.n):
        assert eccentricity(g, u) == max(dist[u])


def test_diameter_trivia():
    assert diameter_bruteforce(graphs.cycle_graph(6)) == 3
    assert diameter_bruteforce(graphs.complete_graph(5)) == 1


@given(seeded_graph)
def test_ecc_diameter_sandwich(g):
    d = diameter_bruteforce(g)
    for u in range(g.n):
        e = eccentricity(g, u)
        assert e <= d <= 2 * e


@given(seeded_graph, st.randoms(use_true_random=False))
def test_triangle_inequality_on_sampled_triples(g, rnd):
    dist = {u: bfs_distances(g, u) for u in range(g.n)}
    for _ in range(10):
        a, b, c = (rnd.randrange(g.n) for _ in range(3))
        assert dist[a][c] <= dist[a][b] + dist[b][c]


def test_graph_invariants_enforced():
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 0)])  # self loop
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 3)])  # out of range
    with pytest.raises(GraphError, match="unreachable"):
        Graph.from_edges(4, [(0, 1), (2, 3)])  # disconnected


def test_adjacency_sorted_and_symmetric():
    g = generate("random", 15, seed=9, p=0.3)
    for u in range(g.n):
        assert list(g.adj[u]) == sorted(set(g.adj[u]))
        assert u not in g.adj[u]
        for v in g.adj[u]:
            assert u in g.adj[v]


@pytest.mark.parametrize("family", graphs.FAMILIES)
def test_generators_connected_and_deterministic(family):
    p = 0.2 if family == "random" else None
    a = generate(family, 13, seed=7, p=p)
    b = generate(family, 13, seed=7, p=p)
    assert a == b
    bfs_distances(a, 0)  # connected or raises


def test_generate_random_needs_p():
    with pytest.raises(GraphError):
        generate("random", 10, seed=0)


def test_generate_seeds_differ():
    assert generate("random", 20, seed=0, p=0.2) != generate("random", 20, seed=1, p=0.2)


def test_edge_list_roundtrip(tmp_path):
    g = generate("grid", 12, seed=4)
    path = tmp_path / "g.edges"
    write_edge_list(g, path)
    text = path.read_text()
    first, *rest = text.splitlines()
    assert first == f"{g.n} {g.m}"
    assert all(int(a) < int(b) for a, b in (line.split() for line in rest))
    assert rest == sorted(rest, key=lambda s: tuple(map(int, s.split())))
    assert read_edge_list(path) == g


def test_edge_list_rejects_disconnected(tmp_path):
    path = tmp_path / "bad.edges"
    path.write_text("4 2\n0 1\n2 3\n")
    with pytest.raises(GraphError):
        read_edge_list(path)


def test_bipartite_delta_definition():
    from qcongest.gadgets import DisjInput, gadget_build, gadget_apply_inputs
    from qcongest.graphs import BipartiteGadget, bipartite_delta

    gad = gadget_build(10)
    inp = DisjInput(4, "1111", "1111")
    g = gadget_apply_inputs(gad, inp)
    delta = bipartite_delta(
        BipartiteGadget(g, gad.left, gad.right, gad.cut_edges, gad.roles)
    )
    dist = floyd_warshall(g)
    assert delta == max(dist[u][v] for u in gad.left for v in gad.right)
    assert delta == 3  # some x_ij = y_ij = 1 forces a cross distance of 3
    assert delta <= diameter_bruteforce(g)
