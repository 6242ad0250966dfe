"""Online verification of stability and B-optimality in all three query models."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .model import Matching, PreferenceProfile, Realization, Side, potential_blockers
from .oracles import AnswerSource, Oracle, QueryModel
from .rotations import Rotation, rotations_from_edges

STABLE = "Stable"
BLOCKING_PAIR = "BlockingPair"
B_OPTIMAL = "BOptimal"
NOT_STABLE = "NotStable"
ROTATION_EXPOSED = "RotationExposed"


@dataclass
class VerifyResult:
    verdict: str
    witness: object
    model: QueryModel
    oracle: Oracle
    a_oracle: Oracle | None = None
    stats: dict = field(default_factory=dict)

    @property
    def queries(self) -> int:
        extra = self.a_oracle.count if self.a_oracle is not None else 0
        return self.oracle.count + extra

    @property
    def knowledge(self):
        return self.oracle.knowledge

    @property
    def positive(self) -> bool:
        return self.verdict in (STABLE, B_OPTIMAL)

    def to_dict(self) -> dict:
        w = self.witness
        if isinstance(w, Rotation):
            w = [list(p) for p in w.cycle]
        elif isinstance(w, tuple):
            w = list(w)
        return {"verdict": self.verdict, "witness": w, "queries": self.queries, "model": self.model.value}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _oracle(source: AnswerSource | Realization | Oracle, side: Side = Side.B) -> Oracle:
    return source if isinstance(source, Oracle) else Oracle(source, side)


def verify_stable_comparison(profile: PreferenceProfile, m: Matching, source) -> VerifyResult:
    """Ask every b ranked above M(a) by a whether it prefers a to M(b)."""
    oracle = _oracle(source)
    for i in range(profile.n):
        for j in profile.above(i, m.of_a(i)):
            if oracle.prefer(j, m.of_b(j), i) == i:
                return VerifyResult(BLOCKING_PAIR, (i, j), QueryModel.COMPARISON, oracle)
    return VerifyResult(STABLE, None, QueryModel.COMPARISON, oracle)


def verify_stable_twosided(m: Matching, source_a, source_b) -> VerifyResult:
    """Both sides hidden: probe b first, then a only when b would defect.

    ``source_a`` answers prefer(a, b1, b2) over B; ``source_b`` the usual B-side queries.
    """
    a_oracle = _oracle(source_a, Side.A)
    b_oracle = _oracle(source_b, Side.B)
    n = m.n
    for i in range(n):
        for j in range(n):
            if j == m.of_a(i):
                continue
            if b_oracle.prefer(j, i, m.of_b(j)) != i:
                continue
            if a_oracle.prefer(i, j, m.of_a(i)) == j:
                return VerifyResult(BLOCKING_PAIR, (i, j), QueryModel.COMPARISON, b_oracle, a_oracle)
    return VerifyResult(STABLE, None, QueryModel.COMPARISON, b_oracle, a_oracle)


def verify_stable_interview(profile: PreferenceProfile, m: Matching, source) -> VerifyResult:
    """Interview M(b) and then each potential blocker of b."""
    oracle = _oracle(source)
    for j in range(profile.n):
        z = potential_blockers(profile, m, j)
        if not z:
            continue
        order: tuple[int, ...] = ()
        for i in [m.of_b(j)] + z:
            if i not in oracle.interviewed(j):
                order = oracle.interview(j, i)
        partner_pos = order.index(m.of_b(j))
        for i in order[:partner_pos]:
            if i in z:
                return VerifyResult(BLOCKING_PAIR, (i, j), QueryModel.INTERVIEW, oracle)
    return VerifyResult(STABLE, None, QueryModel.INTERVIEW, oracle)


def verify_stable_set(profile: PreferenceProfile, m: Matching, source) -> VerifyResult:
    """One query top(b, Z(b) + M(b)) per b with a non-empty Z(b)."""
    oracle = _oracle(source)
    for j in range(profile.n):
        z = potential_blockers(profile, m, j)
        if not z:
            continue
        t = oracle.top(j, z + [m.of_b(j)])
        if t != m.of_b(j):
            return VerifyResult(BLOCKING_PAIR, (t, j), QueryModel.SET, oracle)
    return VerifyResult(STABLE, None, QueryModel.SET, oracle)


def _halve(profile: PreferenceProfile, i: int, r: set[int]) -> list[int]:
    """The ceil(|R|/2) members of R that a_i ranks highest."""
    ranked = sorted(r, key=profile.a_rank[i].__getitem__)
    return ranked[: (len(ranked) + 1) // 2]


def set_query_budget(n: int) -> int:
    """Upper bound 2n(ceil(log2 n) + 2) on the queries of :func:`verify_b_optimal_set`."""
    return 2 * n * (math.ceil(math.log2(n)) + 2)


def verify_b_optimal_set(profile: PreferenceProfile, m: Matching, source) -> VerifyResult:
    """Decide stability plus B-optimality with O(n log n) set queries.

    ``stats["r_sizes"]`` holds |R(a)| at the start of every iteration and
    ``stats["iterations"]`` the number of iterations run.
    """
    oracle = _oracle(source)
    stable = verify_stable_set(profile, m, oracle)
    if not stable.positive:
        return VerifyResult(NOT_STABLE, stable.witness, QueryModel.SET, oracle, stats={"iterations": 0, "r_sizes": []})

    n = profile.n
    r = [set(profile.below(i, m.of_a(i))) for i in range(n)]
    # confirmed[i] = b known to prefer a_i over M(b); the earliest such b bounds R(a_i)
    confirmed: list[int | None] = [None] * n

    def best(i: int) -> int | None:
        return min(r[i], key=profile.a_rank[i].__getitem__) if r[i] else None

    def decided(i: int) -> bool:
        return not r[i] or best(i) == confirmed[i]

    r_sizes = []
    iterations = 0
    while not all(decided(i) for i in range(n)):
        iterations += 1
        r_sizes.append([len(x) for x in r])
        u = {i for i in range(n) if not decided(i)}
        bar = {i: set(_halve(profile, i, r[i])) for i in u}
        for j in range(n):
            ub = {i for i in u if j in bar[i]}
            while ub:
                t = oracle.top(j, ub | {m.of_b(j)})
                if t == m.of_b(j):
                    for i in ub:
                        r[i].discard(j)
                    ub = set()
                else:
                    u.discard(t)
                    ub.discard(t)
                    cut = profile.a_rank[t][j]
                    r[t] = {x for x in r[t] if profile.a_rank[t][x] <= cut}
                    if confirmed[t] is None or profile.a_rank[t][j] < profile.a_rank[t][confirmed[t]]:
                        confirmed[t] = j
    r_sizes.append([len(x) for x in r])
    stats = {"iterations": iterations, "r_sizes": r_sizes}

    redges = [best(i) for i in range(n)]
    rots = rotations_from_edges(m, redges)
    if rots:
        return VerifyResult(ROTATION_EXPOSED, rots[0], QueryModel.SET, oracle, stats=stats)
    return VerifyResult(B_OPTIMAL, None, QueryModel.SET, oracle, stats=stats)
