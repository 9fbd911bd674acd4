from __future__ import annotations

import math

import pytest

from qcongest import graphs
from qcongest.diameter import (
    LEADER_QUBIT_C2,
    approx_diameter,
    approx_guarantee_holds,
    exact_diameter,
    exact_diameter_simple,
)
from qcongest.graphs import generate
from qcongest.procedures import id_bits


def test_exact_on_clique():
    g = graphs.complete_graph(4)
    assert exact_diameter(g, seed=1).d_out == 1
    assert exact_diameter_simple(g, seed=1).d_out == 1


def test_exact_on_path_p10():
    g = graphs.path_graph(10)
    assert exact_diameter(g, seed=2).d_out == 9
    assert exact_diameter_simple(g, seed=2).d_out == 9


@pytest.mark.parametrize("seed", range(10))
def test_exact_matches_bruteforce_random(seed):
    g = generate("random", 18, seed=seed, p=0.2)
    d_true = graphs.diameter_bruteforce(g)
    assert exact_diameter(g, seed=seed).d_out == d_true
    assert exact_diameter_simple(g, seed=seed).d_out == d_true


def test_exact_engine_backend_agrees():
    g = generate("lollipop", 11, seed=3)
    d_true = graphs.diameter_bruteforce(g)
    res_fast = exact_diameter(g, seed=5, backend="fast")
    res_engine = exact_diameter(g, seed=5, backend="engine")
    assert res_fast.d_out == res_engine.d_out == d_true
    assert res_fast.report.rounds == res_engine.report.rounds


def test_approx_guarantee_small_diameter():
    for seed in range(5):
        g = generate("random", 16, seed=seed, p=0.45)
        d_true = graphs.diameter_bruteforce(g)
        assert d_true <= 3
        res = approx_diameter(g, seed=seed)
        assert res.d_out <= d_true <= math.ceil(3 * res.d_out / 2)


def test_approx_on_path_p30():
    g = graphs.path_graph(30)
    res = approx_diameter(g, seed=4)
    assert res.d_out <= 29 <= math.ceil(3 * res.d_out / 2)


@pytest.mark.parametrize("seed", range(8))
def test_approx_guarantee_random(seed):
    g = generate("random", 24, seed=seed, p=0.15)
    d_true = graphs.diameter_bruteforce(g)
    res = approx_diameter(g, seed=seed)
    assert approx_guarantee_holds(res.d_out, d_true)
    assert res.d_out <= d_true  # a true max of true eccentricities


def test_cost_identity_rounds():
    g = generate("cycle", 20, seed=6)
    res = exact_diameter(g, seed=6)
    per_call = max(res.t_setup, res.t_eval)
    assert res.report.rounds == res.t0 + res.search.total_calls * per_call
    assert res.search.rounds_charged == res.report.rounds


def test_leader_memory_within_declared_constant():
    for fam, n, p in [("path", 32, None), ("random", 32, 0.2), ("lollipop", 21, None)]:
        g = generate(fam, n, seed=1, p=p)
        res = exact_diameter(g, seed=1)
        leader = res.report.leader
        peak = res.report.per_node_peak_qubits[leader]
        assert peak <= LEADER_QUBIT_C2 * id_bits(n) ** 2


def test_node_memory_smaller_than_leader():
    g = generate("random", 24, seed=2, p=0.2)
    res = exact_diameter(g, seed=2)
    leader = res.report.leader
    qubits = res.report.per_node_peak_qubits
    assert all(qubits[v] <= qubits[leader] for v in range(g.n))


def test_trivial_sizes():
    one = graphs.Graph.from_edges(1, [])
    two = graphs.path_graph(2)
    assert exact_diameter(one).d_out == 0
    assert exact_diameter(two).d_out == 1
    assert approx_diameter(two).d_out == 1


def test_determinism_same_seed():
    g = generate("grid", 20, seed=7)
    a = exact_diameter(g, seed=9)
    b = exact_diameter(g, seed=9)
    assert (a.d_out, a.report.rounds, a.search.total_calls) == (
        b.d_out,
        b.report.rounds,
        b.search.total_calls,
    )
