"""The pipelined evaluation procedure: max eccentricity over a DFS window.

Given the BFS tree of a root whose eccentricity d satisfies d <= D <= 2d,
the procedure computes, for an input node u0 known to everyone,

    f(u0) = max { ecc(v) : v in S(u0) },

where S(u0) is the cyclic DFS-number window of width 2d starting at u0.
It runs in three budgeted phases plus a mirror-cost cleanup reversal:

  1. a token walks 2d steps of the DFS traversal starting at u0 (wrapping
     through one idle step at the root), assigning each first-visited node
     its walk offset tau'(v);
  2. for 6d+1 rounds every node relays distance waves: v in S starts its
     wave at relative round 2*tau'(v), and a node keeps an incoming wave
     (tau', delta) only if tau' exceeds the last kept tau', recording
     d_v = max(d_v, delta) and forwarding (tau', delta+1);
  3. the maximum d_v is aggregated up the tree to the root in d rounds.

Phase 2's budget is one round more than the 6d a naive count suggests: a
wave started at relative round 4d can take 2d further hops, so its last
delivery lands at relative round 6d.  Delivery completeness is asserted.

The wave discipline is self-synchronizing: first arrivals of wave types at
any node come in increasing tau' order (asserted, with the start of a
node's own wave counting as an event), and all messages surviving the
drop rule in one round at one node are identical (asserted).  The computed
S is checked against the central window oracle on every run.

Two interchangeable backends exist: an engine NodeProgram (word-level,
traceable) and a vectorized simulation used inside the search loops.  They
produce identical values and identical cost accounting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import (
    CostReport,
    EngineError,
    NodeContext,
    NodeProgram,
    RegisterField,
    RegisterSchema,
    Word,
    pack_bits,
    run,
    unpack_bits,
)
from .graphs import Graph
from .procedures import BfsTreeState, DfsNumbering, dfs_numbering, id_bits, set_S

_TAG_TOKEN, _TAG_EVAL, _TAG_UPCAST = 0, 1, 2


class EvaluationInvariantError(EngineError):
    """A runtime contract of the evaluation procedure was violated."""


@dataclass(frozen=True)
class EvalContext:
    """Branch-independent preprocessing shared by all u0 evaluations."""

    g: Graph
    tree: BfsTreeState
    restrict: frozenset[int] | None
    numbering: DfsNumbering
    children_r: tuple[tuple[int, ...], ...]
    first_visit: tuple[bool, ...]  # per tour position
    d: int
    base: int  # cyclic index space (2k)
    indptr: np.ndarray
    indices: np.ndarray
    quantum_bits: tuple[int, ...]  # per-node branch-dependent register size

    @property
    def s1_end(self) -> int:
        return 2 * self.d

    @property
    def s2_last_send(self) -> int:
        return 8 * self.d  # last round a wave may legally be kept/forwarded

    @property
    def s3_start(self) -> int:
        return 8 * self.d + 1

    @property
    def total_rounds(self) -> int:
        return 9 * self.d + 1

    def node_quantum_bits(self) -> int:
        return max(self.quantum_bits)


def _eval_field_bits(n: int, deg: int) -> int:
    L, L2 = id_bits(n), (2 * n).bit_length()
    # u0, tau'+1, t_v+1, d_v, walk cursor, wrap-hold phase
    return L + L2 + L2 + L2 + (deg + 1).bit_length() + 2


def make_eval_context(
    g: Graph, tree: BfsTreeState, restrict: frozenset[int] | None = None
) -> EvalContext:
    numbering = dfs_numbering(tree, restrict)
    allowed = None if restrict is None else frozenset(restrict)
    children_r = tuple(
        tree.children[v]
        if allowed is None
        else tuple(c for c in tree.children[v] if c in allowed)
        for v in range(g.n)
    )
    first_visit = tuple(
        numbering.tau[v] == p for p, v in enumerate(numbering.traversal)
    )
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    for v in range(g.n):
        indptr[v + 1] = indptr[v] + g.degree(v)
    indices = np.fromiter(
        (u for v in range(g.n) for u in g.adj[v]), dtype=np.int64, count=int(indptr[-1])
    )
    qbits = tuple(_eval_field_bits(g.n, g.degree(v)) for v in range(g.n))
    return EvalContext(
        g=g,
        tree=tree,
        restrict=allowed,
        numbering=numbering,
        children_r=children_r,
        first_visit=first_visit,
        d=tree.ecc_leader,
        base=numbering.index_space,
        indptr=indptr,
        indices=indices,
        quantum_bits=qbits,
    )


def _walk_positions(ectx: EvalContext, u0: int) -> tuple[dict[int, int], int]:
    """Offsets tau' of first-visited nodes plus the number of token sends."""
    tour = ectx.numbering.traversal
    t0 = ectx.numbering.tau[u0]
    base = ectx.base
    taup: dict[int, int] = {}
    sends = 0
    prev_idle_or_wrap = False
    for j in range(2 * ectx.d + 1):
        p = (t0 + j) % base
        if p == base - 1:  # idle position at the root
            prev_idle_or_wrap = True
            continue
        v = tour[p]
        if j > 0 and not (p == 0 and prev_idle_or_wrap):
            sends += 1
        if p == 0 and prev_idle_or_wrap:
            prev_idle_or_wrap = False
        if ectx.first_visit[p] and v not in taup:
            taup[v] = j
    return taup, sends


# ---------------------------------------------------------------------------
# Engine backend
# ---------------------------------------------------------------------------


class EvaluationProgram(NodeProgram):
    """Word-level implementation of the three forward phases."""

    always_wake = True  # phases are clock-driven

    def __init__(self, ectx: EvalContext, u0: int):
        self.ectx = ectx
        self.u0 = u0
        n = ectx.g.n
        self.L = id_bits(n)
        self.L2 = (2 * n).bit_length()
        self._arrivals: dict[int, tuple[int, int]] = {}

    def schema(self, ctx: NodeContext) -> RegisterSchema:
        L, L2 = self.L, self.L2
        return RegisterSchema(
            (
                RegisterField("u0", L, quantum=True),
                RegisterField("taup1", L2, quantum=True),
                RegisterField("t1", L2, quantum=True),
                RegisterField("dv", L2, quantum=True),
                RegisterField("cursor", (len(ctx.neighbors) + 1).bit_length(), quantum=True),
                RegisterField("hold", 2, quantum=True),
            )
        )

    def init_state(self, ctx: NodeContext) -> dict:
        return {
            "u0": self.u0,
            "taup1": 0,
            "t1": 0,
            "dv": 0,
            "cursor": 0,
            "hold": 0,
        }

    # -- message helpers ----------------------------------------------------

    def _token(self, offset: int) -> Word:
        return pack_bits([(_TAG_TOKEN, 2), (offset, self.L2)])

    def _eval(self, taup: int, delta: int) -> Word:
        return pack_bits([(_TAG_EVAL, 2), (taup, self.L2), (delta, self.L2)])

    def _upcast(self, val: int) -> Word:
        return pack_bits([(_TAG_UPCAST, 2), (val, self.L2)])

    def _event(self, v: int, round_no: int, taup: int) -> None:
        prev = self._arrivals.get(v)
        if prev is not None:
            r1, t1 = prev
            if round_no - r1 < taup - t1:
                raise EvaluationInvariantError(
                    f"wave order violated at node {v}: rounds {r1}->{round_no} "
                    f"but tau' {t1}->{taup}"
                )
        self._arrivals[v] = (round_no, taup)

    def _advance_token(
        self, ctx: NodeContext, state: dict, out: dict[int, Word], round_no: int
    ) -> None:
        """Send the token onward (or begin the wrap hold at the root)."""
        ectx, v = self.ectx, ctx.node
        if round_no >= 2 * ectx.d:
            return
        kids = ectx.children_r[v]
        if state["cursor"] < len(kids):
            out[kids[state["cursor"]]] = self._token(round_no + 1)
        elif v != ectx.tree.leader:
            out[ectx.tree.parent[v]] = self._token(round_no + 1)
        else:
            state["hold"] = 1  # tour end: idle one position, then restart

    def step(self, ctx, state, inbox, round_no):
        ectx = self.ectx
        out: dict[int, Word] = {}
        v = ctx.node
        d = ectx.d

        token_offset = None
        kept: list[tuple[int, int]] = []
        up_vals: list[int] = []
        for sender, word in inbox.items():
            tag = int(word.bits[:2], 2)
            if tag == _TAG_TOKEN:
                _, offset = unpack_bits(word, (2, self.L2))
                assert offset == round_no, "token offset must equal the round index"
                token_offset = offset
                if sender == ectx.tree.parent[v]:
                    # top-down arrival: first visit on the master tour
                    if state["taup1"]:
                        raise EvaluationInvariantError(
                            f"walk first-visited node {v} twice"
                        )
                    state["taup1"] = offset + 1
                    state["cursor"] = 0
                else:
                    state["cursor"] = ectx.children_r[v].index(sender) + 1
            elif tag == _TAG_EVAL:
                _, taup, delta = unpack_bits(word, (2, self.L2, self.L2))
                if taup + 1 > state["t1"]:
                    kept.append((taup, delta))
            else:
                _, val = unpack_bits(word, (2, self.L2))
                up_vals.append(val)

        if round_no == 0 and v == self.u0:
            state["taup1"] = 1  # tau'(u0) = 0
            state["cursor"] = 0
            self._advance_token(ctx, state, out, 0)
        elif token_offset is not None:
            self._advance_token(ctx, state, out, round_no)
        elif state["hold"] == 1:
            state["hold"] = 2
        elif state["hold"] == 2:
            state["hold"] = 0
            # wrap: the root is first-visited again at tour position 0
            if round_no <= 2 * d:
                if not state["taup1"]:
                    state["taup1"] = round_no + 1
                state["cursor"] = 0
                self._advance_token(ctx, state, out, round_no)

        if kept:
            if round_no > ectx.s2_last_send:
                raise EvaluationInvariantError(
                    f"wave still in flight at node {v} after the 6d-round window"
                )
            if len(set(kept)) > 1:
                raise EvaluationInvariantError(
                    f"non-identical surviving messages at node {v}: {sorted(set(kept))}"
                )
            taup, delta = kept[0]
            if state["taup1"] and 2 * d + 2 * (state["taup1"] - 1) == round_no:
                raise EvaluationInvariantError(
                    f"node {v} keeps a foreign wave in its own start round"
                )
            self._event(v, round_no, taup)
            # the wire carries hops-so-far minus one (origins send 0), so the
            # distance this wave traveled to reach us is delta + 1
            state["t1"] = taup + 1
            state["dv"] = max(state["dv"], delta + 1)
            for u in ctx.neighbors:
                out[u] = self._eval(taup, delta + 1)

        if state["taup1"] and round_no == 2 * d + 2 * (state["taup1"] - 1):
            taup = state["taup1"] - 1
            self._event(v, round_no, taup)
            state["t1"] = max(state["t1"], taup + 1)
            for u in ctx.neighbors:
                out[u] = self._eval(taup, 0)

        # phase 3: subtree maxima climb one level per round; children's
        # reports land exactly in the round their parent is scheduled to send
        if up_vals:
            state["dv"] = max(state["dv"], max(up_vals))
        depth = ectx.tree.dist[v]
        if v != ectx.tree.leader and round_no == ectx.s3_start + (d - depth):
            out[ectx.tree.parent[v]] = self._upcast(state["dv"])
            return state, out, True
        if v == ectx.tree.leader and round_no == ectx.total_rounds:
            return state, out, True
        return state, out, False

    def output(self, ctx, state):
        result = {"taup": state["taup1"] - 1 if state["taup1"] else None, "dv": state["dv"]}
        if ctx.node == self.ectx.tree.leader:
            result["f"] = state["dv"]
        return result


def _evaluate_engine(ectx: EvalContext, u0: int) -> tuple[int, int, int, dict[int, int]]:
    program = EvaluationProgram(ectx, u0)
    outputs, report = run(ectx.g, program, max_rounds=ectx.total_rounds + 2)
    taup = {v: o["taup"] for v, o in outputs.items() if o["taup"] is not None}
    return outputs[ectx.tree.leader]["f"], report.rounds, report.total_words, taup


# ---------------------------------------------------------------------------
# Vectorized backend (identical semantics and accounting)
# ---------------------------------------------------------------------------


def _evaluate_fast(ectx: EvalContext, u0: int) -> tuple[int, int, int, dict[int, int]]:
    d = ectx.d
    n = ectx.g.n
    indptr, indices = ectx.indptr, ectx.indices
    taup, walk_sends = _walk_positions(ectx, u0)
    words = walk_sends

    own_start: dict[int, list[int]] = {}
    for v, t in taup.items():
        own_start.setdefault(2 * d + 2 * t, []).append(v)

    t1 = np.zeros(n, dtype=np.int64)
    dv = np.zeros(n, dtype=np.int64)
    last_r = np.full(n, -(10**9), dtype=np.int64)
    last_t = np.zeros(n, dtype=np.int64)
    start_round = np.full(n, -1, dtype=np.int64)
    for v, t in taup.items():
        start_round[v] = 2 * d + 2 * t

    bsrc = np.empty(0, dtype=np.int64)
    btau = np.empty(0, dtype=np.int64)
    bdel = np.empty(0, dtype=np.int64)

    tmp_min = np.empty(n, dtype=np.int64)
    tmp_max = np.empty(n, dtype=np.int64)

    adj = ectx.g.adj
    for r in range(2 * d, ectx.s3_start + 1):
        kept_nodes = np.empty(0, dtype=np.int64)
        kept_tau = kept_del = kept_nodes
        if 0 < bsrc.size <= 8:
            # scalar route for sparse rounds: identical drop/keep semantics
            survivors: dict[int, tuple[int, int]] = {}
            for s, mt, md in zip(bsrc.tolist(), btau.tolist(), bdel.tolist()):
                for v in adj[s]:
                    words += 1
                    if mt < t1[v]:
                        continue
                    if r > ectx.s2_last_send:
                        raise EvaluationInvariantError(
                            f"wave still in flight at node {v} after the "
                            "6d-round window"
                        )
                    if v in survivors and survivors[v] != (mt, md):
                        raise EvaluationInvariantError(
                            f"non-identical surviving messages at node {v}"
                        )
                    survivors[v] = (mt, md)
            if survivors:
                for v, (mt, md) in survivors.items():
                    if start_round[v] == r:
                        raise EvaluationInvariantError(
                            f"node {v} keeps a foreign wave in its own start round"
                        )
                    if last_r[v] > -(10**8) and (r - last_r[v]) < (mt - last_t[v]):
                        raise EvaluationInvariantError("wave order violated")
                    last_r[v] = r
                    last_t[v] = mt
                    t1[v] = mt + 1
                    if md + 1 > dv[v]:
                        dv[v] = md + 1
                kept_nodes = np.fromiter(survivors, dtype=np.int64, count=len(survivors))
                kept_tau = np.fromiter(
                    (mt for mt, _ in survivors.values()), dtype=np.int64, count=len(survivors)
                )
                kept_del = np.fromiter(
                    (md for _, md in survivors.values()), dtype=np.int64, count=len(survivors)
                )
        elif bsrc.size:
            deg = indptr[bsrc + 1] - indptr[bsrc]
            recv = np.concatenate(
                [indices[indptr[s] : indptr[s + 1]] for s in bsrc]
            )
            words += int(recv.size)
            mtau = np.repeat(btau, deg)
            mdel = np.repeat(bdel, deg)
            mask = mtau >= t1[recv]
            recv, mtau, mdel = recv[mask], mtau[mask], mdel[mask]
            if recv.size:
                if r > ectx.s2_last_send:
                    raise EvaluationInvariantError(
                        f"wave still in flight at node {int(recv[0])} after the "
                        "6d-round window"
                    )
                tmp_min.fill(2**60)
                tmp_max.fill(-1)
                np.minimum.at(tmp_min, recv, mtau)
                np.maximum.at(tmp_max, recv, mtau)
                kept_nodes = np.unique(recv)
                if not np.array_equal(tmp_min[kept_nodes], tmp_max[kept_nodes]):
                    bad = kept_nodes[tmp_min[kept_nodes] != tmp_max[kept_nodes]][0]
                    raise EvaluationInvariantError(
                        f"non-identical surviving messages at node {int(bad)}"
                    )
                kept_tau = tmp_min[kept_nodes]
                tmp_min.fill(2**60)
                tmp_max.fill(-1)
                np.minimum.at(tmp_min, recv, mdel)
                np.maximum.at(tmp_max, recv, mdel)
                if not np.array_equal(tmp_min[kept_nodes], tmp_max[kept_nodes]):
                    bad = kept_nodes[tmp_min[kept_nodes] != tmp_max[kept_nodes]][0]
                    raise EvaluationInvariantError(
                        f"non-identical surviving messages at node {int(bad)}"
                    )
                kept_del = tmp_min[kept_nodes]
                if np.any(start_round[kept_nodes] == r):
                    bad = kept_nodes[start_round[kept_nodes] == r][0]
                    raise EvaluationInvariantError(
                        f"node {int(bad)} keeps a foreign wave in its own start round"
                    )
                seen = last_r[kept_nodes] > -(10**8)
                if np.any((r - last_r[kept_nodes][seen]) < (kept_tau[seen] - last_t[kept_nodes][seen])):
                    raise EvaluationInvariantError("wave order violated")
                last_r[kept_nodes] = r
                last_t[kept_nodes] = kept_tau
                t1[kept_nodes] = kept_tau + 1
                np.maximum.at(dv, kept_nodes, kept_del + 1)

        starters = own_start.get(r, [])
        if starters:
            sv = np.asarray(starters, dtype=np.int64)
            stau = np.asarray([taup[v] for v in starters], dtype=np.int64)
            seen = last_r[sv] > -(10**8)
            if np.any((r - last_r[sv][seen]) < (stau[seen] - last_t[sv][seen])):
                raise EvaluationInvariantError("wave order violated at own start")
            last_r[sv] = r
            last_t[sv] = stau
            t1[sv] = np.maximum(t1[sv], stau + 1)
            bsrc = np.concatenate([kept_nodes, sv])
            btau = np.concatenate([kept_tau, stau])
            bdel = np.concatenate([kept_del + 1, np.zeros(len(starters), dtype=np.int64)])
        else:
            bsrc, btau, bdel = kept_nodes, kept_tau, kept_del + 1

    words += n - 1  # upcast: every non-root reports once
    f = int(dv.max())
    return f, ectx.total_rounds, words, taup


# ---------------------------------------------------------------------------
# Public entry point
# ---------------------------------------------------------------------------


def evaluation_procedure(
    g: Graph,
    tree: BfsTreeState,
    u0: int,
    restrict: frozenset[int] | None = None,
    backend: str = "fast",
    ectx: EvalContext | None = None,
) -> tuple[int, CostReport]:
    """Compute f(u0) = max eccentricity over the DFS window of u0.

    Returns the value and a cost report whose rounds and words include the
    mirror-image cost of the cleanup reversal (phase costs doubled).
    """
    if ectx is None:
        ectx = make_eval_context(g, tree, restrict)
    if restrict is not None and u0 not in (ectx.restrict or ()):  # pragma: no cover
        raise EngineError(f"u0={u0} outside the restricted candidate set")
    if backend == "fast":
        f, rounds, words, taup = _evaluate_fast(ectx, u0)
    elif backend == "engine":
        f, rounds, words, taup = _evaluate_engine(ectx, u0)
    else:
        raise EngineError(f"unknown backend {backend!r}")

    expected = set_S(u0, ectx.d, ectx.numbering)
    computed = frozenset(taup)
    if computed != expected:
        raise EvaluationInvariantError(
            f"computed S differs from the window oracle for u0={u0}: "
            f"extra={sorted(computed - expected)} missing={sorted(expected - computed)}"
        )
    report = CostReport(
        rounds=2 * rounds,
        total_words=2 * words,
        per_node_peak_bits={v: ectx.quantum_bits[v] for v in range(g.n)},
        per_node_peak_qubits={v: ectx.quantum_bits[v] for v in range(g.n)},
        leader=tree.leader,
    )
    return f, report
