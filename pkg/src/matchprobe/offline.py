"""Full-information computations: minimum certificates, offline certifiers, reductions.

The brute-force search is counterexample guided.  Some completion of the
current knowledge violates the target; every certificate must contain a
query whose true answer differs from that completion's answer, so the search
branches over exactly those queries, with iterative deepening on the
certificate size and a memo of knowledge states that failed at a given
budget.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .graphs import INF, DirectedGraph, FeedbackMode, feedback_arc_set
from .knowledge import (
    CertTarget,
    KnowledgeState,
    OracleSizeError,
    _completion,
    _stability_witnesses,
    certifies_semantic,
    iter_counterexamples,
    iter_witnesses,
)
from .model import (
    AgentId,
    Instance,
    Matching,
    MatchprobeError,
    PreferenceProfile,
    Realization,
    Side,
    a_optimal_matching,
    b_optimal_matching,
    is_stable,
    potential_blockers,
    stable_matchings,
)
from .oracles import Oracle, Query, QueryModel
from .rotations import exposed_rotations, r_edges

DEFAULT_LIMITS = {QueryModel.COMPARISON: 5, QueryModel.INTERVIEW: 5, QueryModel.SET: 4}
CANDIDATES = 8  # counterexamples inspected per node when picking the narrowest branch


class NotBOptimalError(MatchprobeError):
    pass


class NoCertificateError(MatchprobeError):
    """The matching does not meet the target under the true preferences."""


@dataclass(frozen=True)
class CertificateProblem:
    """``matching=None`` asks for the cheapest proof that finds a matching meeting ``target``."""

    model: QueryModel
    target: CertTarget
    instance: Instance
    matching: Matching | None = None

    def __post_init__(self) -> None:
        self.instance.require_realization()


@dataclass
class Certificate:
    size: int
    queries: list[Query]
    answers: list[object]
    knowledge: KnowledgeState
    matching: Matching
    stats: dict = field(default_factory=dict)


def size_limit(model: QueryModel) -> int:
    env = os.environ.get("MATCHPROBE_ORACLE_LIMIT")
    return int(env) if env else DEFAULT_LIMITS[model]


# -- query universes ---------------------------------------------------------


def _true_answer(real: Realization, q: Query):
    rank = real.b_rank[q.agent.index]
    if q.model is QueryModel.INTERVIEW:
        raise ValueError("interview answers depend on the prefix")
    return min(q.payload, key=rank.__getitem__)


def _apply(k: KnowledgeState, q: Query, ans) -> KnowledgeState:
    if q.model is QueryModel.COMPARISON:
        x, y = q.payload
        return k.with_relation(q.agent.index, ans, y if ans == x else x)
    return k.with_top(q.agent.index, ans, q.payload)


def set_universe(m: Matching, n: int) -> list[Query]:
    """top(b, S + M(b)) for every non-empty S not containing M(b)."""
    out = []
    for j in range(n):
        p = m.of_b(j)
        others = [i for i in range(n) if i != p]
        for r in range(1, len(others) + 1):
            for s in itertools.combinations(others, r):
                out.append(Query(QueryModel.SET, AgentId(Side.B, j), tuple(sorted(s + (p,)))))
    return out


def full_set_universe(n: int) -> list[Query]:
    out = []
    for j in range(n):
        for r in range(2, n + 1):
            for s in itertools.combinations(range(n), r):
                out.append(Query(QueryModel.SET, AgentId(Side.B, j), s))
    return out


def _comparison_moves(k: KnowledgeState, truth: Realization, cex: Realization) -> list[Query]:
    """Comparisons answered differently by ``truth`` and ``cex``."""
    out = []
    n = k.n
    for j in range(n):
        tr, cr = truth.b_rank[j], cex.b_rank[j]
        for x in range(n):
            for y in range(x + 1, n):
                if (tr[x] < tr[y]) != (cr[x] < cr[y]):
                    out.append(Query(QueryModel.COMPARISON, AgentId(Side.B, j), (x, y)))
    return out


def _components_lb(k: KnowledgeState, profile: PreferenceProfile, m: Matching, rows: Iterable[int]) -> int:
    """Comparisons still needed to relate every potential blocker of b to M(b).

    Each comparison joins at most two components of the comparability graph
    at b, and relating a set requires it to lie in one component.
    """
    total = 0
    for j in rows:
        p = m.of_b(j)
        need = [i for i in potential_blockers(profile, m, j) if not k.entails(j, p, i)]
        if not need:
            continue
        parent = list(range(k.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x, y in k.relations(j):
            parent[find(x)] = find(y)
        comps = {find(i) for i in need} | {find(p)}
        total += len(comps) - 1
    return total


def _set_lb(k: KnowledgeState, profile: PreferenceProfile, m: Matching, rows: Iterable[int]) -> int:
    total = 0
    for j in rows:
        p = m.of_b(j)
        if any(not k.entails(j, p, i) for i in potential_blockers(profile, m, j)):
            total += 1
    return total


# -- generic search ----------------------------------------------------------------


@dataclass
class _Search:
    start: object
    counterexamples: Callable[[object], Iterator[Realization]]
    moves: Callable[[object, Realization], list[tuple[object, int, object]]]  # (move, cost, next state)
    lower_bound: Callable[[object], int]
    key: Callable[[object], object]
    nodes: int = 0

    def run(self, cap: int = 10_000) -> tuple[int, list]:
        self.failed: dict[object, int] = {}
        budget = self.lower_bound(self.start)
        while budget <= cap:
            found = self._dfs(self.start, budget)
            if found is not None:
                return sum(c for _, c in found), [mv for mv, _ in found]
            budget += 1
        raise NoCertificateError("no certificate within the size cap")

    def _dfs(self, state, budget: int):
        self.nodes += 1
        if self.lower_bound(state) > budget:
            return None
        cexs = list(itertools.islice(self.counterexamples(state), CANDIDATES))
        if not cexs:
            return []
        if budget == 0:
            return None
        key = self.key(state)
        if self.failed.get(key, -1) >= budget:
            return None
        options = min((self.moves(state, c) for c in cexs), key=len)
        for mv, cost, nxt in options:
            if cost > budget:
                continue
            rest = self._dfs(nxt, budget - cost)
            if rest is not None:
                return [(mv, cost)] + rest
        self.failed[key] = budget
        return None


def _knowledge_search(
    profile: PreferenceProfile,
    truth: Realization,
    m: Matching,
    model: QueryModel,
    cex_fn: Callable[[KnowledgeState], Iterator[Realization]],
    universe: list[Query] | None,
    lb: Callable[[KnowledgeState], int],
    start: KnowledgeState | None = None,
) -> tuple[int, list[Query]]:
    def moves(k: KnowledgeState, cex: Realization):
        if model is QueryModel.COMPARISON:
            qs = _comparison_moves(k, truth, cex)
        else:
            qs = [q for q in universe if _true_answer(truth, q) != _true_answer(cex, q)]
        return [(q, 1, _apply(k, q, _true_answer(truth, q))) for q in qs]

    k0 = start if start is not None else KnowledgeState.empty(profile.n)
    search = _Search(k0, cex_fn, moves, lb, lambda k: k.signature())
    return search.run()


def _pivot_search(
    profile: PreferenceProfile, truth: Realization, m: Matching, start: KnowledgeState
) -> tuple[int, list[Query]]:
    """Rotation part of a B-optimality certificate using only queries prefer(b, M(b), a).

    Knowledge built from such queries relates agents only through M(b), so a
    witness is refuted exactly when the truth contradicts one of its own
    constraints; those constraints are the branching options.
    """

    def witnesses(k: KnowledgeState):
        return iter_witnesses(k, profile, m, CertTarget.STABLE_B_OPTIMAL)

    def moves(k: KnowledgeState, cons: dict[int, list[tuple[int, int]]]):
        out = []
        for j, pairs in sorted(cons.items()):
            for x, y in pairs:
                if truth.prefers(j, y, x):
                    q = Query(QueryModel.COMPARISON, AgentId(Side.B, j), tuple(sorted((x, y))))
                    out.append((q, 1, k.with_relation(j, y, x)))
        return out

    search = _Search(start, witnesses, moves, lambda k: 0, lambda k: k.signature())
    return search.run()


def _interview_search(
    profile: PreferenceProfile,
    truth: Realization,
    m: Matching,
    cex_fn: Callable[[KnowledgeState], Iterator[Realization]],
    rows: Iterable[int],
) -> tuple[int, list[Query]]:
    n = profile.n
    rows = list(rows)

    def knowledge(state) -> KnowledgeState:
        k = KnowledgeState.empty(n)
        for j, s in enumerate(state):
            k = k.with_order(j, sorted(s, key=truth.b_rank[j].__getitem__))
        return k

    def moves(state, cex: Realization):
        out = []
        for j in range(n):
            tr, cr = truth.b_rank[j], cex.b_rank[j]
            for x in range(n):
                for y in range(x + 1, n):
                    if (tr[x] < tr[y]) != (cr[x] < cr[y]):
                        new = frozenset({x, y}) - state[j]
                        nxt = state[:j] + (state[j] | new,) + state[j + 1 :]
                        out.append(((j, tuple(sorted(new))), len(new), nxt))
        out.sort(key=lambda t: t[1])
        return out

    def lb(state) -> int:
        total = 0
        for j in rows:
            z = potential_blockers(profile, m, j)
            if z:
                total += len(({m.of_b(j)} | set(z)) - state[j])
        return total

    start = tuple(frozenset() for _ in range(n))
    search = _Search(start, lambda s: cex_fn(knowledge(s)), moves, lb, lambda s: s)
    size, mvs = search.run()
    qs = []
    for j, agents in mvs:
        for i in agents:
            qs.append(Query(QueryModel.INTERVIEW, AgentId(Side.B, j), (i,)))
    return size, qs


def _verify_size(problem: CertificateProblem, m: Matching, universe: str) -> tuple[int, list[Query]]:
    inst = problem.instance
    profile, truth = inst.profile, inst.require_realization()
    target = problem.target
    model = problem.model

    lb_base = _components_lb if model is QueryModel.COMPARISON else _set_lb

    def search(cex_fn, rows):
        if model is QueryModel.INTERVIEW:
            return _interview_search(profile, truth, m, cex_fn, rows)
        pool = None
        if model is QueryModel.SET:
            pool = set_universe(m, profile.n) if universe == "pivot" else full_set_universe(profile.n)
        return _knowledge_search(
            profile, truth, m, model, cex_fn, pool, lambda k: lb_base(k, profile, m, rows)
        )

    if target is CertTarget.STABLE:
        # conditions at different b share no relation, so solve each b alone
        total, qs = 0, []
        for j in range(profile.n):
            if not potential_blockers(profile, m, j):
                continue

            def cex_fn(k: KnowledgeState, j=j) -> Iterator[Realization]:
                for cons in _stability_witnesses(k, profile, m):
                    if j in cons:
                        yield _completion(k, cons, truth)

            size, part = search(cex_fn, [j])
            total += size
            qs += part
        return total, qs
    def cex_all(k: KnowledgeState) -> Iterator[Realization]:
        return iter_counterexamples(k, profile, m, target, truth)

    if model is QueryModel.COMPARISON and universe == "pivot" and target is CertTarget.STABLE_B_OPTIMAL:
        # with comparisons against M(b) only, each stability relation needs its own direct query
        forced = [
            Query(QueryModel.COMPARISON, AgentId(Side.B, j), tuple(sorted((m.of_b(j), i))))
            for j in range(profile.n)
            for i in potential_blockers(profile, m, j)
        ]
        k0 = KnowledgeState.empty(profile.n)
        for q in forced:
            k0 = _apply(k0, q, _true_answer(truth, q))
        size, rest = _pivot_search(profile, truth, m, k0)
        return len(forced) + size, forced + rest
    return search(cex_all, range(profile.n))


def min_certificate(problem: CertificateProblem, limit: int | None = None, universe: str = "pivot") -> Certificate:
    """Smallest query set whose true answers prove the target.

    ``universe="pivot"`` restricts the search to queries that involve M(b):
    prefer(b, M(b), a) for comparisons with the B-optimal target, and
    top(b, S + M(b)) for set queries.  ``"full"`` searches every query.
    """
    if universe not in ("pivot", "full"):
        raise ValueError(f"unknown universe {universe!r}")
    inst = problem.instance
    n = inst.n
    cap = size_limit(problem.model) if limit is None else limit
    if n > cap:
        raise OracleSizeError(f"{problem.model.value} brute force limited to n <= {cap}, got n = {n}")
    truth = inst.require_realization()
    if problem.matching is not None:
        candidates = [problem.matching]
    elif problem.target is CertTarget.STABLE:
        candidates = stable_matchings(inst)
    elif problem.target is CertTarget.STABLE_B_OPTIMAL:
        candidates = [b_optimal_matching(inst)]
    else:
        candidates = [a_optimal_matching(inst)]

    best: tuple[int, list[Query], Matching] | None = None
    for m in candidates:
        if not is_stable(inst, m):
            raise NoCertificateError(f"{m} is not stable under the true preferences")
        if problem.target is CertTarget.STABLE_B_OPTIMAL and m != b_optimal_matching(inst):
            raise NoCertificateError(f"{m} is not B-optimal")
        if problem.target is CertTarget.STABLE_A_OPTIMAL and m != a_optimal_matching(inst):
            raise NoCertificateError(f"{m} is not A-optimal")
        size, qs = _verify_size(problem, m, universe)
        if best is None or size < best[0]:
            best = (size, qs, m)
    assert best is not None
    size, qs, m = best
    oracle = Oracle(truth)
    answers = []
    for q in qs:
        j = q.agent.index
        if q.model is QueryModel.COMPARISON:
            answers.append(oracle.prefer(j, *q.payload))
        elif q.model is QueryModel.SET:
            answers.append(oracle.top(j, q.payload))
        else:
            answers.append(oracle.interview(j, q.payload[0]))
    return Certificate(size, qs, answers, oracle.knowledge, m)


# -- offline certifiers ---------------------------------------------------------


def _require_b_optimal(instance: Instance, m: Matching) -> None:
    if not is_stable(instance, m) or exposed_rotations(instance, m):
        raise NotBOptimalError(f"{m} is not the B-optimal stable matching")


def _certificate_from(oracle: Oracle, m: Matching, stats: dict | None = None) -> Certificate:
    qs = [q for q, _ in oracle.transcript.entries]
    ans = [a for _, a in oracle.transcript.entries]
    return Certificate(len(qs), qs, ans, oracle.knowledge, m, stats or {})


def certify_b_optimal_approx_comparison(
    instance: Instance, m: Matching, mode: FeedbackMode = FeedbackMode.EXACT
) -> Certificate:
    """Stability queries, one confirmation per r-edge, then refute a feedback arc set of the leftovers."""
    from .knowledge import is_refuted

    _require_b_optimal(instance, m)
    profile = instance.profile
    n = profile.n
    oracle = Oracle(instance.require_realization())
    for i in range(n):
        for j in profile.above(i, m.of_a(i)):
            oracle.prefer(j, m.of_b(j), i)
    redges = r_edges(instance, m)
    for i, j in enumerate(redges):
        if j is not None:
            oracle.prefer(j, i, m.of_b(j))
    # vertices: a_i -> i, b_j -> n + j
    arcs: list[tuple[int, int]] = []
    weights: dict = {}
    potential = []
    for j in range(n):
        arc = (n + j, m.of_b(j))
        arcs.append(arc)
        weights[arc] = INF
    for i in range(n):
        if redges[i] is not None:
            arc = (i, n + redges[i])
            arcs.append(arc)
            weights[arc] = INF
        for j in profile.below(i, m.of_a(i)):
            if j == redges[i]:
                break
            if not is_refuted(oracle.knowledge, profile, m, i, j):
                arc = (i, n + j)
                arcs.append(arc)
                weights[arc] = 1
                potential.append(arc)
    fas = feedback_arc_set(DirectedGraph(2 * n, tuple(arcs), weights), mode)
    for i, bj in fas:
        j = bj - n
        oracle.prefer(j, i, m.of_b(j))
    return _certificate_from(oracle, m, {"potential": len(potential), "fas": len(fas)})


def certify_b_optimal_offline_set(instance: Instance, m: Matching) -> Certificate:
    """At most 3n set queries: stability, one refutation set per b, one confirmation per r-edge."""
    _require_b_optimal(instance, m)
    profile = instance.profile
    truth = instance.require_realization()
    n = profile.n
    oracle = Oracle(truth)
    for j in range(n):
        z = potential_blockers(profile, m, j)
        if z:
            oracle.top(j, z + [m.of_b(j)])
    for j in range(n):
        p = m.of_b(j)
        pb = [i for i in range(n) if i != p and profile.prefers(i, m.of_a(i), j) and truth.prefers(j, p, i)]
        if pb:
            oracle.top(j, pb + [p])
    for i, j in enumerate(r_edges(instance, m)):
        if j is not None:
            oracle.top(j, [i, m.of_b(j)])
    return _certificate_from(oracle, m)


def fig1_certificate(instance: Instance) -> Certificate:
    """The 2n-2 comparison certificate for the lower-bound family.

    Every agent with an r-edge gets one confirming query; a_{n-1}, which has
    none, gets one refuting query per b below its partner.
    """
    m = instance.matching or Matching.identity(instance.n)
    _require_b_optimal(instance, m)
    profile = instance.profile
    oracle = Oracle(instance.require_realization())
    for i, j in enumerate(r_edges(instance, m)):
        if j is not None:
            oracle.prefer(j, i, m.of_b(j))
        else:
            for jj in profile.below(i, m.of_a(i)):
                oracle.prefer(jj, i, m.of_b(jj))
    return _certificate_from(oracle, m)


# -- reductions ------------------------------------------------------------------


def _check_simple(graph: DirectedGraph) -> None:
    if graph.has_self_loop():
        raise ValueError("reductions need a graph without self-loops")


def _arc_reduction(graph: DirectedGraph, label: str) -> Instance:
    """a_v ranks first every b_w with (v, w) not an arc, then b_v, then the b_u with (v, u) an arc."""
    _check_simple(graph)
    n = graph.n
    a_rows, b_rows = [], []
    for v in range(n):
        out = set(graph.out_neighbors(v))
        front = [w for w in range(n) if w != v and w not in out]
        a_rows.append(tuple(front + [v] + sorted(out)))
        b_rows.append((v,) + tuple(x for x in range(n) if x != v))
    return Instance(PreferenceProfile(tuple(a_rows)), Realization(tuple(b_rows)), Matching.identity(n), label)


def _graph_label(prefix: str, graph: DirectedGraph) -> str:
    return f"{prefix}-{graph.name}" if graph.name else f"{prefix}-n{graph.n}-m{len(graph.arcs)}"


def gen_fas_reduction(graph: DirectedGraph) -> Instance:
    return _arc_reduction(graph, _graph_label("FAS", graph))


def gen_fvs_reduction(graph: DirectedGraph) -> Instance:
    """Set-query construction: M(a_v) below M(a_u) in a_v's list exactly for arcs (v, u)."""
    return _arc_reduction(graph, _graph_label("FVS", graph))


def gen_interview_hardness(graph: DirectedGraph) -> Instance:
    """The comparison construction plus dummies z (index n in A) and z' (index n in B)."""
    base = _arc_reduction(graph, "")
    n = graph.n
    z = n
    a_rows = [(z,) + row for row in base.profile.a_prefs]
    a_rows.append(tuple(range(n)) + (z,))
    b_rows = [row + (z,) for row in base.require_realization().b_prefs]
    b_rows.append((z,) + tuple(range(n)))
    return Instance(
        PreferenceProfile(tuple(a_rows)),
        Realization(tuple(b_rows)),
        Matching.identity(n + 1),
        _graph_label("INTQ", graph),
    )


def relationship_lower_bound(profile: PreferenceProfile, m: Matching) -> int:
    """Comparisons any stability certificate of M needs."""
    return sum(len(potential_blockers(profile, m, j)) for j in range(profile.n))


def semantic_check(cert: Certificate, instance: Instance, target: CertTarget) -> bool:
    return certifies_semantic(cert.knowledge, instance.profile, cert.matching, target)


def iter_problems(instances: Iterable[Instance], model: QueryModel, target: CertTarget) -> Iterator[CertificateProblem]:
    for inst in instances:
        yield CertificateProblem(model, target, inst, inst.matching)
