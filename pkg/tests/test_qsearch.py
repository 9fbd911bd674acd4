from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcongest.qsearch import (
    AmplitudeState,
    QOptConfig,
    SearchError,
    amplitude_amplify_decide,
    decide_call_budget,
    distributed_cost,
    grover_iterate,
    maximize_call_budget,
    quantum_maximize,
    setup_subset,
    setup_uniform,
)


def reflection_matrix_oracle(setup: np.ndarray, marked: np.ndarray) -> np.ndarray:
    """Independent route: the explicit product of the two reflections."""
    n = len(setup)
    flip = np.diag(np.where(marked, -1.0, 1.0).astype(complex))
    reflect = 2.0 * np.outer(setup, setup.conj()) - np.eye(n, dtype=complex)
    return reflect @ flip


def test_single_marked_of_four_is_exact():
    state = setup_uniform(range(4))
    state = grover_iterate(state, lambda x: x == 3)
    assert abs(abs(state.amps[3]) ** 2 - 1.0) <= 1e-9


def test_empty_marked_fixes_the_start_state():
    state = setup_uniform(range(8))
    after = grover_iterate(state, lambda x: False)
    assert np.allclose(after.amps, state.amps, atol=1e-12)


def test_all_marked_keeps_success_probability_one():
    state = setup_uniform(range(8))
    for _ in range(5):
        state = grover_iterate(state, lambda x: True)
        assert abs(np.sum(np.abs(state.amps) ** 2) - 1.0) <= 1e-9


@given(st.integers(2, 64), st.integers(0, 1000), st.integers(1, 4))
def test_iterate_equals_matrix_oracle(nx, seed, iters):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=nx) + 1j * rng.normal(size=nx)
    setup = raw / np.linalg.norm(raw)
    marked = rng.random(nx) < 0.3
    state = AmplitudeState(tuple(range(nx)), setup.copy(), setup.copy())
    matrix = reflection_matrix_oracle(setup, marked)
    vec = setup.copy()
    for _ in range(iters):
        state = grover_iterate(state, lambda x: bool(marked[x]))
        vec = matrix @ vec
    assert np.allclose(state.amps, vec, atol=1e-9)
    assert abs(np.sum(np.abs(state.amps) ** 2) - 1.0) <= 1e-9


def test_success_probability_recurrence():
    for j in range(1, 33):
        p = j / 64
        theta = math.asin(math.sqrt(p))
        state = setup_uniform(range(64))
        for k in range(1, 51):
            state = grover_iterate(state, lambda x: x < j)
            expect = math.sin((2 * k + 1) * theta) ** 2
            got = float(np.sum(np.abs(state.amps[:j]) ** 2))
            assert abs(got - expect) <= 1e-9


def test_setup_states():
    assert np.allclose(setup_uniform([7]).amps, [1.0])
    assert np.allclose(setup_uniform(range(4)).amps, [0.5] * 4)
    state = setup_subset(range(10), {1, 4, 7})
    expect = np.zeros(10)
    expect[[1, 4, 7]] = 1 / math.sqrt(3)
    assert np.allclose(np.abs(state.amps), expect)


def test_setup_subset_rejects_bad_support():
    with pytest.raises(SearchError):
        setup_subset(range(4), set())
    with pytest.raises(SearchError):
        setup_subset(range(4), {9})


def test_decide_empty_marked_returns_none():
    state = setup_uniform(range(16))
    for seed in range(20):
        found, _ = amplitude_amplify_decide(state, lambda x: False, 0.25, 0.1, seed)
        assert found is None


def test_decide_success_rate():
    state = setup_uniform(range(16))
    marked = lambda x: x < 4
    hits = sum(
        amplitude_amplify_decide(state, marked, 4 / 16, 0.1, seed)[0] is not None
        for seed in range(1000)
    )
    assert hits >= 900


def test_decide_output_distribution_uniform_over_marked():
    # conditional law over the marked set stays proportional to the setup
    state = setup_uniform(range(16))
    marked = lambda x: x < 4
    counts = {x: 0 for x in range(4)}
    total = 0
    for seed in range(1000):
        found, _ = amplitude_amplify_decide(state, marked, 4 / 16, 0.1, seed)
        if found is not None:
            counts[found] += 1
            total += 1
    expect = total / 4
    sigma = math.sqrt(total * 0.25 * 0.75)
    for x, c in counts.items():
        assert abs(c - expect) <= 3 * sigma


def test_decide_call_budget_respected():
    state = setup_uniform(range(64))
    for eps, delta in [(1 / 64, 0.1), (0.25, 0.01), (1 / 32, 1 / 4096)]:
        _, cost = amplitude_amplify_decide(state, lambda x: False, eps, delta, 5)
        assert cost.total_calls <= decide_call_budget(eps, delta)


def test_maximize_constant_function():
    state = setup_uniform(range(8))
    best, _ = quantum_maximize(lambda x: 5, state, QOptConfig(0.5, 0.05, seed=3))
    assert best in range(8)


def test_maximize_small_instance():
    f = [3, 1, 4, 1]
    state = setup_uniform(range(4))
    wins = 0
    for seed in range(200):
        best, _ = quantum_maximize(
            lambda x: f[x], state, QOptConfig(0.25, 0.05, seed=seed)
        )
        wins += best == 2
    assert wins >= 190  # 1 - delta = 0.95


def test_maximize_restricted_support():
    f = [9, 1, 4, 1, 7, 2]
    state = setup_subset(range(6), {1, 2, 3})
    for seed in range(50):
        best, _ = quantum_maximize(
            lambda x: f[x], state, QOptConfig(1 / 3, 0.05, seed=seed)
        )
        assert best in {1, 2, 3}
    hits = sum(
        quantum_maximize(lambda x: f[x], state, QOptConfig(1 / 3, 0.05, seed=s))[0] == 2
        for s in range(500)
    )
    assert hits >= 475


def test_maximize_empirical_success_many_instances():
    rng = np.random.default_rng(42)
    for trial in range(4):
        vals = rng.integers(0, 10, size=12)
        best_val = vals.max()
        p_opt = float(np.sum(vals == best_val)) / 12
        state = setup_uniform(range(12))
        good = sum(
            vals[quantum_maximize(lambda x: int(vals[x]), state,
                                  QOptConfig(p_opt, 0.1, seed=s))[0]] == best_val
            for s in range(500)
        )
        assert good >= 450  # 1 - delta


def test_maximize_cost_soundness():
    f = [0, 1, 2, 3, 4, 5, 6, 7]
    state = setup_uniform(range(8))
    for eps, delta in [(1 / 8, 0.05), (0.5, 0.01)]:
        _, cost = quantum_maximize(lambda x: f[x], state, QOptConfig(eps, delta, seed=1))
        assert cost.total_calls <= maximize_call_budget(eps, delta)


def test_distributed_cost_formula():
    zero = distributed_cost(10, 3, 5, _cost(0, 0, 0), 4, epsilon=0.5, n_candidates=8)
    assert zero.rounds == 10
    twelve = distributed_cost(10, 7, 6, _cost(4, 4, 4), 4, epsilon=0.5, n_candidates=8)
    assert twelve.rounds == 10 + 12 * 7  # = 94: calls charged at max(T_setup, T_eval)


def _cost(s, e, i):
    from qcongest.qsearch import SearchCost

    return SearchCost(setup_calls=s, eval_calls=e, inverse_calls=i)


def test_distributed_cost_memory_charges():
    cost = _cost(1, 1, 1)
    report = distributed_cost(
        0, 1, 1, cost, s_node_qubits=20, epsilon=1 / 64, n_candidates=128, leader=3
    )
    assert cost.node_qubits_peak == 20
    assert cost.leader_qubits_peak == 20 * 6 + 7 * 6
    assert report.per_node_peak_qubits == {3: cost.leader_qubits_peak}


def test_config_validation():
    with pytest.raises(SearchError):
        QOptConfig(0.0, 0.1)
    with pytest.raises(SearchError):
        QOptConfig(0.5, 1.0)


@given(st.integers(0, 500))
def test_determinism_per_seed(seed):
    f = [2, 7, 1, 8, 2, 8]
    state = setup_uniform(range(6))
    a = quantum_maximize(lambda x: f[x], state, QOptConfig(1 / 3, 0.1, seed=seed))
    b = quantum_maximize(lambda x: f[x], state, QOptConfig(1 / 3, 0.1, seed=seed))
    assert a[0] == b[0] and a[1].total_calls == b[1].total_calls
