"""Partial knowledge of B-side preferences and certificate predicates.

A :class:`KnowledgeState` stores, for every b, the transitive closure of the
pairwise relations ``x <_b y`` ("b prefers a_x to a_y") learned so far as one
bitmask per A-agent.  It is an immutable value; updates return a new state
sharing all untouched rows.
"""
from __future__ import annotations

import enum
import heapq
import itertools
import os
from typing import Iterable, Iterator, Sequence

from .model import Matching, MatchprobeError, PreferenceProfile, Realization

DEFAULT_ORACLE_LIMIT = 6


class InconsistentAnswersError(MatchprobeError):
    """A new relation contradicts what is already known (broken oracle)."""


class OracleSizeError(MatchprobeError):
    """An exponential oracle was asked to handle an instance above its size cap."""


class CertTarget(enum.Enum):
    STABLE = "stable"
    STABLE_A_OPTIMAL = "stable-a-optimal"
    STABLE_B_OPTIMAL = "stable-b-optimal"


def oracle_limit(default: int = DEFAULT_ORACLE_LIMIT) -> int:
    env = os.environ.get("MATCHPROBE_ORACLE_LIMIT")
    return int(env) if env else default


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class KnowledgeState:
    __slots__ = ("n", "_rows")

    def __init__(self, n: int, rows: tuple[tuple[int, ...], ...] | None = None):
        self.n = n
        # _rows[b][x]: bitmask of every y with x <_b y entailed
        self._rows = rows if rows is not None else tuple((0,) * n for _ in range(n))

    @classmethod
    def empty(cls, n: int) -> "KnowledgeState":
        return cls(n)

    @classmethod
    def from_relations(cls, n: int, relations: Iterable[tuple[int, int, int]]) -> "KnowledgeState":
        k = cls(n)
        for b, x, y in relations:
            k = k.with_relation(b, x, y)
        return k

    @classmethod
    def from_realization(cls, real: Realization) -> "KnowledgeState":
        """Full knowledge: every b's complete order."""
        k = cls(real.n)
        for b, row in enumerate(real.b_prefs):
            k = k.with_order(b, row)
        return k

    # -- queries ---------------------------------------------------------

    def entails(self, b: int, x: int, y: int) -> bool:
        """True if the answers so far prove b prefers a_x to a_y."""
        return bool(self._rows[b][x] >> y & 1)

    def worse_mask(self, b: int, x: int) -> int:
        return self._rows[b][x]

    def better_mask(self, b: int, y: int) -> int:
        row = self._rows[b]
        return sum(1 << x for x in range(self.n) if row[x] >> y & 1)

    def relations(self, b: int) -> set[tuple[int, int]]:
        row = self._rows[b]
        return {(x, y) for x in range(self.n) for y in _bits(row[x])}

    def all_relations(self) -> set[tuple[int, int, int]]:
        return {(b, x, y) for b in range(self.n) for (x, y) in self.relations(b)}

    def size(self) -> int:
        return sum(bin(m).count("1") for row in self._rows for m in row)

    def issubset(self, other: "KnowledgeState") -> bool:
        return all(
            (mine & ~theirs) == 0
            for r1, r2 in zip(self._rows, other._rows)
            for mine, theirs in zip(r1, r2)
        )

    def signature(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def __eq__(self, other: object) -> bool:
        return isinstance(other, KnowledgeState) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"KnowledgeState(n={self.n}, relations={self.size()})"

    # -- updates ---------------------------------------------------------

    def with_relation(self, b: int, x: int, y: int) -> "KnowledgeState":
        if x == y:
            raise ValueError("a relation needs two distinct A-agents")
        row = self._rows[b]
        if row[x] >> y & 1:
            return self
        if row[y] >> x & 1:
            raise InconsistentAnswersError(
                f"b_{b}: asserting a_{x} < a_{y} contradicts known a_{y} < a_{x}"
            )
        gain = (1 << y) | row[y]
        new = list(row)
        for u in range(self.n):
            if u == x or row[u] >> x & 1:
                new[u] |= gain
        rows = self._rows[:b] + (tuple(new),) + self._rows[b + 1 :]
        return KnowledgeState(self.n, rows)

    def with_order(self, b: int, ordered: Sequence[int]) -> "KnowledgeState":
        """Assert ``ordered[0] <_b ordered[1] <_b ...``."""
        k = self
        for x, y in zip(ordered, ordered[1:]):
            k = k.with_relation(b, x, y)
        return k

    def with_top(self, b: int, top: int, others: Iterable[int]) -> "KnowledgeState":
        k = self
        for y in others:
            if y != top:
                k = k.with_relation(b, top, y)
        return k


def assert_relation(k: KnowledgeState, b: int, x: int, y: int) -> KnowledgeState:
    return k.with_relation(b, x, y)


def consistent_with(k: KnowledgeState, real: Realization) -> bool:
    """True if ``real`` satisfies every relation in ``k``."""
    for b in range(k.n):
        rank = real.b_rank[b]
        for x, y in k.relations(b):
            if rank[x] > rank[y]:
                return False
    return True


# -- fast certifiers ----------------------------------------------------------


def certifies_stable(k: KnowledgeState, profile: PreferenceProfile, m: Matching) -> bool:
    n = profile.n
    for i in range(n):
        for j in profile.above(i, m.of_a(i)):
            if not k.entails(j, m.of_b(j), i):
                return False
    return True


def is_refuted(k: KnowledgeState, profile: PreferenceProfile, m: Matching, i: int, j: int) -> bool:
    """True if (a_i, b_j), with b_j below M(a_i), is provably not a_i's r-edge."""
    if k.entails(j, m.of_b(j), i):
        return True
    for jj in profile.a_prefs[i][profile.a_rank[i][m.of_a(i)] + 1 : profile.a_rank[i][j]]:
        if k.entails(jj, i, m.of_b(jj)):
            return True
    return False


def certifies_b_optimal(k: KnowledgeState, profile: PreferenceProfile, m: Matching) -> bool:
    from .rotations import candidate_graph

    return certifies_stable(k, profile, m) and candidate_graph(profile, m, k).is_acyclic()


def count_relationship_pairs(k: KnowledgeState, m: Matching) -> int:
    """Number of (b, a), a != M(b), for which k entails how a compares to M(b)."""
    total = 0
    for j in range(k.n):
        p = m.of_b(j)
        related = k.worse_mask(j, p) | k.better_mask(j, p)
        total += bin(related & ~(1 << p)).count("1")
    return total


# -- semantic certifier ----------------------------------------------------------


def _feasible(k: KnowledgeState, b: int, pivot: int, above: int, below: int) -> bool:
    """Can b's order extend k with every x in ``above`` before ``pivot`` and every y in ``below`` after it?"""
    if above >> pivot & 1 or below >> pivot & 1 or above & below:
        return False
    if k.worse_mask(b, pivot) & above:
        return False
    for y in _bits(below):
        wy = k.worse_mask(b, y)
        if wy >> pivot & 1 or wy & above:
            return False
    return True


def _extension(
    k: KnowledgeState, b: int, extra: Iterable[tuple[int, int]], tie: Sequence[int] | None
) -> tuple[int, ...] | None:
    """A linear order of A extending k's relations at b plus ``extra``; None if cyclic."""
    n = k.n
    succ = [set(_bits(k.worse_mask(b, x))) for x in range(n)]
    for x, y in extra:
        succ[x].add(y)
    indeg = [0] * n
    for x in range(n):
        for y in succ[x]:
            indeg[y] += 1
    key = tie if tie is not None else range(n)
    heap = [(key[x], x) for x in range(n) if indeg[x] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, x = heapq.heappop(heap)
        out.append(x)
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, (key[y], y))
    return tuple(out) if len(out) == n else None


def _completion(
    k: KnowledgeState,
    constraints: dict[int, list[tuple[int, int]]],
    truth: Realization | None,
) -> Realization:
    rows = []
    for b in range(k.n):
        tie = truth.b_rank[b] if truth is not None else None
        order = _extension(k, b, constraints.get(b, ()), tie)
        if order is None:  # pragma: no cover - callers check feasibility first
            raise InconsistentAnswersError(f"b_{b}: constraints not extendable")
        rows.append(order)
    return Realization(tuple(rows))


def _stability_witnesses(
    k: KnowledgeState, profile: PreferenceProfile, m: Matching
) -> Iterator[dict[int, list[tuple[int, int]]]]:
    for j in range(profile.n):
        p = m.of_b(j)
        for i in range(profile.n):
            if i != p and profile.prefers(i, j, m.of_a(i)) and not k.entails(j, p, i):
                yield {j: [(i, p)]}


def _b_rotation_witnesses(
    k: KnowledgeState, profile: PreferenceProfile, m: Matching
) -> Iterator[dict[int, list[tuple[int, int]]]]:
    """Constraint sets under which some alternating cycle is an exposed rotation.

    For a cycle agent a_i with chosen edge to b_j: b_j must rank a_i above
    M(b_j) and every b between M(a_i) and b_j in a_i's list must rank a_i
    below its partner.
    """
    n = profile.n
    above = [0] * n
    below = [0] * n

    def dfs(start: int, cur: int, visited: int) -> Iterator[None]:
        row = profile.a_prefs[cur]
        lower = row[profile.a_rank[cur][m.of_a(cur)] + 1 :]
        passed: list[int] = []
        for j in lower:
            old_above = above[j]
            above[j] |= 1 << cur
            if _feasible(k, j, m.of_b(j), above[j], below[j]):
                nxt = m.of_b(j)
                if nxt == start:
                    yield None
                elif nxt > start and not visited >> nxt & 1:
                    yield from dfs(start, nxt, visited | 1 << nxt)
            above[j] = old_above
            below[j] |= 1 << cur
            passed.append(j)
            if not _feasible(k, j, m.of_b(j), above[j], below[j]):
                break
        for j in passed:
            below[j] &= ~(1 << cur)

    for start in range(n):
        for _ in dfs(start, start, 1 << start):
            cons: dict[int, list[tuple[int, int]]] = {}
            for j in range(n):
                p = m.of_b(j)
                pairs = [(x, p) for x in _bits(above[j])] + [(p, y) for y in _bits(below[j])]
                if pairs:
                    cons[j] = pairs
            yield cons


def _a_rotation_witnesses(
    k: KnowledgeState, profile: PreferenceProfile, m: Matching
) -> Iterator[dict[int, list[tuple[int, int]]]]:
    """Constraint sets exposing a B-side rotation (M stable but not A-optimal).

    Assumes every completion of k already keeps M stable.  For b with
    potential blockers Z(b), the B-side successor is M(z) for the z in Z(b)
    that b ranks best.
    """
    n = profile.n
    zs = [
        [i for i in range(n) if i != m.of_b(j) and profile.prefers(i, j, m.of_a(i))] for j in range(n)
    ]
    choice: dict[int, int] = {}

    def dfs(start: int, cur: int, visited: int) -> Iterator[None]:
        for z in zs[cur]:
            if any(k.entails(cur, y, z) for y in zs[cur] if y != z):
                continue
            choice[cur] = z
            nxt = m.of_a(z)
            if nxt == start:
                yield None
            elif nxt > start and not visited >> nxt & 1:
                yield from dfs(start, nxt, visited | 1 << nxt)
            del choice[cur]

    for start in range(n):
        for _ in dfs(start, start, 1 << start):
            yield {j: [(z, y) for y in zs[j] if y != z] for j, z in choice.items()}


def iter_witnesses(
    k: KnowledgeState, profile: PreferenceProfile, m: Matching, target: CertTarget
) -> Iterator[dict[int, list[tuple[int, int]]]]:
    """Constraint sets {b: [(x, y), ...]} ("b ranks x above y"), each extendable
    from ``k`` to a completion in which ``m`` fails ``target``."""
    yield from _stability_witnesses(k, profile, m)
    if target is CertTarget.STABLE:
        return
    if _first(_stability_witnesses(k, profile, m)) is not None:
        return
    if target is CertTarget.STABLE_B_OPTIMAL:
        yield from _b_rotation_witnesses(k, profile, m)
    else:
        yield from _a_rotation_witnesses(k, profile, m)


def iter_counterexamples(
    k: KnowledgeState,
    profile: PreferenceProfile,
    m: Matching,
    target: CertTarget,
    truth: Realization | None = None,
) -> Iterator[Realization]:
    """Completions of ``k`` in which ``m`` fails ``target``.

    Not every failing completion is produced: one representative per
    violated condition (blocking pair or exposed rotation), with the
    remaining order chosen closest to ``truth`` when given.
    """
    for cons in iter_witnesses(k, profile, m, target):
        yield _completion(k, cons, truth)


def _first(it: Iterator):
    return next(it, None)


def certifies_semantic(
    k: KnowledgeState,
    profile: PreferenceProfile,
    m: Matching,
    target: CertTarget,
    limit: int | None = None,
) -> bool:
    """True iff ``m`` meets ``target`` under every completion consistent with ``k``."""
    cap = oracle_limit() if limit is None else limit
    if profile.n > cap:
        raise OracleSizeError(f"semantic certifier limited to n <= {cap}, got n = {profile.n}")
    return _first(iter_counterexamples(k, profile, m, target)) is None


# -- literal completion enumeration ----------------------------------------------


def linear_extensions(k: KnowledgeState, b: int) -> Iterator[tuple[int, ...]]:
    """Total orders of A consistent with k at b, in lexicographic order."""
    n = k.n
    rel = k.relations(b)
    for perm in itertools.permutations(range(n)):
        pos = {x: p for p, x in enumerate(perm)}
        if all(pos[x] < pos[y] for x, y in rel):
            yield perm


def enumerate_completions(k: KnowledgeState) -> Iterator[Realization]:
    """Every realization consistent with k, lexicographic by b-index then permutation."""
    per_b = [list(linear_extensions(k, b)) for b in range(k.n)]
    for rows in itertools.product(*per_b):
        yield Realization(rows)


def certifies_by_enumeration(
    k: KnowledgeState,
    profile: PreferenceProfile,
    m: Matching,
    target: CertTarget,
    limit: int = 4,
) -> bool:
    """Definitional certifier: check ``target`` in every completion of k.  Tiny n only."""
    from .model import Instance, a_optimal_matching, b_optimal_matching, is_stable

    if profile.n > limit:
        raise OracleSizeError(f"completion enumeration limited to n <= {limit}")
    for real in enumerate_completions(k):
        inst = Instance(profile, real)
        if not is_stable(inst, m):
            return False
        if target is CertTarget.STABLE_B_OPTIMAL and b_optimal_matching(inst) != m:
            return False
        if target is CertTarget.STABLE_A_OPTIMAL and a_optimal_matching(inst) != m:
            return False
    return True
