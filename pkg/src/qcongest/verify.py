"""Invariant suite behind the ``verify`` CLI command.

Each check returns (ok, detail).  The suite covers the oracle cross-checks,
the window and wave invariants, backend equivalence, amplitude exactness, the
gadget gap, and the two-party schedule grid, at sizes small enough to run
in a few seconds.
"""

from __future__ import annotations

import itertools
import math
import random
from typing import Callable

import numpy as np

from . import graphs
from .evaluation import make_eval_context, evaluation_procedure
from .gadgets import DisjInput, build_reduction_instance
from .procedures import build_bfs_tree, dfs_numbering, elect_leader_and_ecc, set_S
from .qsearch import grover_iterate, setup_uniform
from .twoparty import (
    build_two_party_schedule,
    execute_direct,
    execute_schedule_classical,
    make_random_cell_program,
    validate_schedule,
)

Check = Callable[[], tuple[bool, str]]


def _corpus() -> list[graphs.Graph]:
    specs = [
        ("path", 7, 1, None),
        ("cycle", 9, 2, None),
        ("star", 6, 3, None),
        ("grid", 12, 4, None),
        ("lollipop", 11, 5, None),
        ("random", 14, 6, 0.25),
        ("random", 10, 7, 0.4),
    ]
    return [graphs.generate(f, n, seed=s, p=p) for f, n, s, p in specs]


def check_bfs_oracle() -> tuple[bool, str]:
    for g in _corpus():
        reach = np.eye(g.n, dtype=bool)
        adj = np.zeros((g.n, g.n), dtype=bool)
        for u, v in g.edges():
            adj[u, v] = adj[v, u] = True
        frontier = np.eye(g.n, dtype=bool)
        dist = np.full((g.n, g.n), -1)
        np.fill_diagonal(dist, 0)
        for k in range(1, g.n):
            frontier = (frontier @ adj) & ~reach
            if not frontier.any():
                break
            dist[frontier] = k
            reach |= frontier
        for u in range(g.n):
            got = graphs.bfs_distances(g, u)
            if any(got[v] != dist[u, v] for v in range(g.n)):
                return False, f"BFS mismatch vs matrix powers at node {u}"
    return True, "BFS distances match boolean matrix-power reachability"


def check_ecc_relations() -> tuple[bool, str]:
    for g in _corpus():
        d = graphs.diameter_bruteforce(g)
        for u in range(g.n):
            e = graphs.eccentricity(g, u)
            if not (e <= d <= 2 * e):
                return False, f"ecc relation broken at node {u}"
    return True, "ecc(v) <= D <= 2*ecc(v) on the corpus"


def check_election() -> tuple[bool, str]:
    for g in _corpus():
        leader, ecc, rep = elect_leader_and_ecc(g)
        true_ecc = graphs.eccentricity(g, 0)
        if leader != 0 or ecc != true_ecc:
            return False, f"election wrong: leader={leader} ecc={ecc}"
        if rep.rounds > 3 * true_ecc + 4:
            return False, f"election used {rep.rounds} > 3*ecc+4 rounds"
    return True, "min-id election and eccentricity in <= 3*ecc + 4 rounds"


def check_bfs_tree() -> tuple[bool, str]:
    for g in _corpus():
        leader, ecc, _ = elect_leader_and_ecc(g)
        tree, rep = build_bfs_tree(g, leader, ecc)
        oracle = graphs.bfs_distances(g, leader)
        if any(tree.dist[v] != oracle[v] for v in range(g.n)):
            return False, "tree distances differ from the BFS oracle"
        if rep.rounds != ecc:
            return False, f"tree build took {rep.rounds} rounds, expected {ecc}"
    return True, "tree construction matches the BFS oracle in exactly ecc rounds"


def check_window_coverage() -> tuple[bool, str]:
    for g in _corpus():
        leader, d, _ = elect_leader_and_ecc(g)
        tree, _ = build_bfs_tree(g, leader, d)
        num = dfs_numbering(tree)
        for v in range(g.n):
            count = sum(1 for u0 in range(g.n) if v in set_S(u0, d, num))
            if count < math.ceil(d / 2):
                return False, f"node {v} covered by {count} < ceil(d/2) windows"
    return True, "every node lies in >= ceil(d/2) of the n windows"


def check_evaluation() -> tuple[bool, str]:
    for g in _corpus():
        leader, d, _ = elect_leader_and_ecc(g)
        tree, _ = build_bfs_tree(g, leader, d)
        num = dfs_numbering(tree)
        eccs = graphs.all_eccentricities(g)
        ectx = make_eval_context(g, tree)
        for u0 in range(g.n):
            expected = max(eccs[v] for v in set_S(u0, d, num))
            f_fast, rep_f = evaluation_procedure(g, tree, u0, ectx=ectx, backend="fast")
            f_eng, rep_e = evaluation_procedure(g, tree, u0, ectx=ectx, backend="engine")
            if f_fast != expected or f_eng != expected:
                return False, f"evaluation({u0}) = {f_fast}/{f_eng}, oracle {expected}"
            if (rep_f.rounds, rep_f.total_words) != (rep_e.rounds, rep_e.total_words):
                return False, f"backend accounting differs at u0={u0}"
            if rep_f.rounds > 18 * d + 8:
                return False, f"evaluation rounds {rep_f.rounds} > 18d+8"
    return True, "both backends equal the window-max oracle with identical accounting"


def check_window_distances() -> tuple[bool, str]:
    for g in _corpus():
        leader, d, _ = elect_leader_and_ecc(g)
        tree, _ = build_bfs_tree(g, leader, d)
        num = dfs_numbering(tree)
        for u0 in range(0, g.n, 2):
            s = sorted(set_S(u0, d, num), key=lambda v: (num.tau[v] - num.tau[u0]) % num.index_space)
            taup = {v: (num.tau[v] - num.tau[u0]) % num.index_space for v in s}
            for v, w in itertools.combinations(s, 2):
                lo, hi = (v, w) if taup[v] < taup[w] else (w, v)
                if graphs.bfs_distances(g, lo)[hi] > taup[hi] - taup[lo]:
                    return False, f"window distance bound broken for {lo},{hi}"
    return True, "d(v,w) <= tau'(w) - tau'(v) inside every sampled window"


def check_grover() -> tuple[bool, str]:
    state = setup_uniform(range(4))
    state = grover_iterate(state, lambda x: x == 2)
    p = abs(state.amps[2]) ** 2
    if abs(p - 1.0) > 1e-9:
        return False, f"one iteration on |X|=4 gave p={p}"
    for frac in (1, 2, 4, 8, 16, 32):
        state = setup_uniform(range(64))
        marked = lambda x: x < frac
        theta = math.asin(math.sqrt(frac / 64))
        for k in range(1, 21):
            state = grover_iterate(state, marked)
            expect = math.sin((2 * k + 1) * theta) ** 2
            got = float(np.sum(np.abs(state.amps[:frac]) ** 2))
            if abs(got - expect) > 1e-9:
                return False, f"recurrence broken at k={k}, p={frac}/64"
    return True, "single-marked exactness and sin((2k+1)theta) recurrence hold"


def check_gadget_gap() -> tuple[bool, str]:
    for xb in itertools.product("01", repeat=4):
        for yb in itertools.product("01", repeat=4):
            inst = build_reduction_instance(10, DisjInput(4, "".join(xb), "".join(yb)))
            if (inst.delta <= 2) != (inst.disj == 1):
                return False, f"gap broken at x={inst.inp.x} y={inst.inp.y}"
    return True, "delta <= 2 iff DISJ = 1, exhaustively at n=10"


def check_schedule_grid() -> tuple[bool, str]:
    for r in range(1, 33):
        for d in range(1, 9):
            rep = validate_schedule(build_two_party_schedule(r, d), r, d)
            if not rep.ok:
                return False, f"schedule invalid at r={r} d={d}: {rep.violations[0]}"
    rng = random.Random(7)
    for trial in range(20):
        r, d = rng.randrange(1, 33), rng.randrange(1, 9)
        prog = make_random_cell_program(8, 8, seed=trial)
        x, y = rng.randrange(256), rng.randrange(256)
        sched = build_two_party_schedule(r, d)
        if execute_schedule_classical(prog, x, y, sched)[0] != execute_direct(prog, x, y, r, d)[0]:
            return False, f"two-party execution diverges at r={r} d={d}"
    return True, "schedule grid causal, executions bit-identical"


CHECKS: list[tuple[str, Check]] = [
    ("bfs-oracle", check_bfs_oracle),
    ("ecc-relations", check_ecc_relations),
    ("leader-election", check_election),
    ("bfs-tree", check_bfs_tree),
    ("window-coverage", check_window_coverage),
    ("window-distances", check_window_distances),
    ("evaluation", check_evaluation),
    ("grover-exactness", check_grover),
    ("gadget-gap", check_gadget_gap),
    ("two-party-schedule", check_schedule_grid),
]


def run_all(verbose: bool = True) -> bool:
    all_ok = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # surfaced as a failure, not a crash
            ok, detail = False, f"exception: {exc}"
        all_ok &= ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name:22s} {detail}")
    return all_ok
