"""r-edges, exposed rotations and the candidate-edge digraph."""
from __future__ import annotations

from dataclasses import dataclass

from .knowledge import KnowledgeState, is_refuted
from .model import Instance, Matching, MatchprobeError, PreferenceProfile, is_stable


class RotationError(MatchprobeError):
    pass


@dataclass(frozen=True)
class Rotation:
    """Matched pairs (a, b) in cycle order; a_{k+1} = next_A(a_k)."""

    cycle: tuple[tuple[int, int], ...]

    def agents(self) -> set[int]:
        return {i for i, _ in self.cycle}

    def __str__(self) -> str:
        return "[" + ", ".join(f"(a_{i},b_{j})" for i, j in self.cycle) + "]"


def r_edge(instance: Instance, m: Matching, i: int) -> int | None:
    """s_A(a_i): the best b below M(a_i) that prefers a_i to its partner, or None."""
    real = instance.require_realization()
    for j in instance.profile.below(i, m.of_a(i)):
        if real.prefers(j, i, m.of_b(j)):
            return j
    return None


def r_edges(instance: Instance, m: Matching) -> list[int | None]:
    return [r_edge(instance, m, i) for i in range(instance.n)]


def rotations_from_edges(m: Matching, redges: list[int | None]) -> list[Rotation]:
    """Cycles of a -> M(r(a)), each starting at its lowest A-index, sorted by it."""
    n = m.n
    color = [0] * n  # 0 unseen, 1 on current path, 2 done
    found = []
    for s in range(n):
        if color[s]:
            continue
        path = []
        cur: int | None = s
        while cur is not None and color[cur] == 0:
            color[cur] = 1
            path.append(cur)
            j = redges[cur]
            cur = m.of_b(j) if j is not None else None
        if cur is not None and color[cur] == 1:
            cyc = path[path.index(cur) :]
            k = cyc.index(min(cyc))
            cyc = cyc[k:] + cyc[:k]
            found.append(Rotation(tuple((i, m.of_a(i)) for i in cyc)))
        for x in path:
            color[x] = 2
    found.sort(key=lambda r: r.cycle[0][0])
    return found


def exposed_rotations(instance: Instance, m: Matching) -> list[Rotation]:
    return rotations_from_edges(m, r_edges(instance, m))


def apply_rotation(m: Matching, rot: Rotation, instance: Instance | None = None) -> Matching:
    """Each a on the cycle takes the partner of its successor.

    With ``instance`` given, the rotation is first checked to be exposed.
    """
    if instance is not None and rot not in exposed_rotations(instance, m):
        raise RotationError(f"rotation {rot} is not exposed in {m}")
    pairs = list(m.pairs)
    cyc = rot.cycle
    for k, (i, j) in enumerate(cyc):
        if m.of_a(i) != j:
            raise RotationError(f"(a_{i},b_{j}) is not in the matching")
        pairs[i] = cyc[(k + 1) % len(cyc)][1]
    return Matching(tuple(pairs))


@dataclass(frozen=True)
class RotationCandidateGraph:
    """Matching arcs b -> M(b) plus unrefuted candidate arcs a -> b.

    Vertices are ('A', i) and ('B', j); ``refuted`` keeps the candidate
    arcs that the knowledge state already excludes, for reporting.
    """

    n: int
    matching: Matching
    candidate: tuple[tuple[int, int], ...]
    refuted: tuple[tuple[int, int], ...] = ()

    def is_acyclic(self) -> bool:
        return find_cycle(self) is None

    def out_arcs(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.candidate:
            adj[i].append(j)
        return adj

    def to_dot(self) -> str:
        lines = ["digraph candidates {", "  rankdir=LR;"]
        for j, i in ((j, self.matching.of_b(j)) for j in range(self.n)):
            lines.append(f'  b{j} -> a{i} [label="M", style=bold];')
        for i, j in self.candidate:
            lines.append(f'  a{i} -> b{j} [label="unrefuted"];')
        for i, j in self.refuted:
            lines.append(f'  a{i} -> b{j} [label="refuted", style=dashed, color=gray];')
        lines.append("}")
        return "\n".join(lines)


def candidate_graph(profile: PreferenceProfile, m: Matching, k: KnowledgeState) -> RotationCandidateGraph:
    cand = []
    refuted = []
    for i in range(profile.n):
        for j in profile.below(i, m.of_a(i)):
            (refuted if is_refuted(k, profile, m, i, j) else cand).append((i, j))
    return RotationCandidateGraph(profile.n, m, tuple(cand), tuple(refuted))


def find_cycle(graph: RotationCandidateGraph) -> list[int] | None:
    """A-agents of some alternating cycle, or None.  Iterative three-colour DFS.

    Since matching arcs are a bijection b -> M(b), the digraph is contracted
    to A: a -> M(b) for each candidate arc (a, b).
    """
    n = graph.n
    m = graph.matching
    adj = [[m.of_b(j) for j in row] for row in graph.out_arcs()]
    color = [0] * n
    for s in range(n):
        if color[s]:
            continue
        stack = [(s, iter(adj[s]))]
        path = [s]
        color[s] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                color[node] = 2
            elif color[nxt] == 1:
                return path[path.index(nxt) :]
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(adj[nxt])))
    return None


def is_acyclic(graph: RotationCandidateGraph) -> bool:
    return graph.is_acyclic()


def is_b_optimal(instance: Instance, m: Matching) -> bool:
    """Full-information check: stable and no exposed rotation."""
    return is_stable(instance, m) and not exposed_rotations(instance, m)
