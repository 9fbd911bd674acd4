from __future__ import annotations

import itertools

import pytest

from qcongest import graphs
from qcongest.evaluation import evaluation_procedure, make_eval_context
from qcongest.graphs import generate
from qcongest.procedures import build_bfs_tree, dfs_numbering, elect_leader_and_ecc, set_S

CORPUS = [
    ("path", 6, 1, None),
    ("cycle", 10, 2, None),
    ("star", 7, 3, None),
    ("grid", 12, 4, None),
    ("lollipop", 11, 5, None),
    ("random", 15, 6, 0.25),
    ("random", 20, 7, 0.15),
]


def prepared(spec):
    fam, n, seed, p = spec
    g = generate(fam, n, seed=seed, p=p)
    leader, ecc, _ = elect_leader_and_ecc(g)
    tree, _ = build_bfs_tree(g, leader, ecc)
    return g, tree


def window_max_oracle(g, tree, u0, d, restrict=None):
    num = dfs_numbering(tree, restrict)
    return max(graphs.eccentricity(g, v) for v in set_S(u0, d, num))


def test_path_hand_example():
    # 0-1-2 with the root at node 0 and u0 = 2: window {2, 0}, both ecc 2
    g = graphs.path_graph(3)
    tree, _ = build_bfs_tree(g, 0, 2)
    f, _ = evaluation_procedure(g, tree, 2)
    assert f == 2
    assert f == window_max_oracle(g, tree, 2, 2)


def test_f_equals_diameter_when_window_covers_all():
    # ecc(leader) >= n/2 on a cycle makes 2d >= 2n - 2: the window is V
    g = graphs.cycle_graph(8)
    tree, _ = build_bfs_tree(g, 0, 4)
    d_true = graphs.diameter_bruteforce(g)
    for u0 in range(g.n):
        f, _ = evaluation_procedure(g, tree, u0)
        assert f == d_true


@pytest.mark.parametrize("spec", CORPUS, ids=[f"{s[0]}-{s[1]}" for s in CORPUS])
def test_matches_oracle_both_backends(spec):
    g, tree = prepared(spec)
    d = tree.ecc_leader
    ectx = make_eval_context(g, tree)
    for u0 in range(g.n):
        expected = window_max_oracle(g, tree, u0, d)
        f_fast, rep_fast = evaluation_procedure(g, tree, u0, backend="fast", ectx=ectx)
        f_eng, rep_eng = evaluation_procedure(g, tree, u0, backend="engine", ectx=ectx)
        assert f_fast == expected
        assert f_eng == expected
        assert rep_fast.rounds == rep_eng.rounds
        assert rep_fast.total_words == rep_eng.total_words


@pytest.mark.parametrize("spec", CORPUS[:4], ids=[f"{s[0]}-{s[1]}" for s in CORPUS[:4]])
def test_round_cost_is_branch_uniform_and_bounded(spec):
    g, tree = prepared(spec)
    d = tree.ecc_leader
    ectx = make_eval_context(g, tree)
    rounds = set()
    for u0 in range(g.n):
        _, rep = evaluation_procedure(g, tree, u0, ectx=ectx)
        rounds.add(rep.rounds)
    assert len(rounds) == 1
    assert rounds.pop() <= 18 * d + 8


def test_window_distance_bound_on_offsets():
    # offsets are walk positions: d(v, w) <= tau'(w) - tau'(v) inside a window
    g, tree = prepared(("random", 15, 6, 0.25))
    num = dfs_numbering(tree)
    d = tree.ecc_leader
    for u0 in range(g.n):
        s = set_S(u0, d, num)
        taup = {v: (num.tau[v] - num.tau[u0]) % num.index_space for v in s}
        for v, w in itertools.combinations(sorted(s, key=taup.get), 2):
            assert graphs.bfs_distances(g, v)[w] <= taup[w] - taup[v]


def test_restricted_window_evaluation():
    g, tree_l = prepared(("random", 16, 9, 0.25))
    # rebuild the tree from an arbitrary non-leader root, as the
    # approximation algorithm does
    w = max(range(g.n), key=lambda v: (graphs.eccentricity(g, v), -v))
    tree, _ = build_bfs_tree(g, w)
    order = sorted(range(g.n), key=lambda v: (tree.dist[v], v))
    for size in (1, 3, 7):
        restrict = frozenset(order[:size])
        ectx = make_eval_context(g, tree, restrict)
        for u0 in sorted(restrict):
            expected = window_max_oracle(g, tree, u0, tree.ecc_leader, restrict)
            f, _ = evaluation_procedure(
                g, tree, u0, restrict=restrict, ectx=ectx
            )
            assert f == expected


def test_quantum_register_footprint_is_logarithmic():
    g, tree = prepared(("random", 20, 7, 0.15))
    ectx = make_eval_context(g, tree)
    L = (g.n - 1).bit_length()
    assert ectx.node_quantum_bits() <= 8 * L + 16


def test_eval_context_rejects_outside_candidates():
    g, tree = prepared(("path", 6, 1, None))
    restrict = frozenset({tree.leader})
    with pytest.raises(Exception):
        bad = next(v for v in range(g.n) if v not in restrict)
        evaluation_procedure(g, tree, bad, restrict=restrict)
