"""Directed graphs with optional arc weights, feedback arc and vertex sets."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx

from .model import MatchprobeError

INF = math.inf


class FeedbackError(MatchprobeError):
    """Some cycle consists only of infinite-weight elements."""


class FeedbackMode(enum.Enum):
    EXACT = "exact"
    GREEDY = "greedy"


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    arcs: tuple[tuple[int, int], ...]
    weights: dict = field(default_factory=dict, compare=False)
    name: str = ""

    def __post_init__(self) -> None:
        for u, v in self.arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u}, {v}) outside vertex range 0..{self.n - 1}")

    def weight(self, arc: tuple[int, int]) -> float:
        return self.weights.get(arc, 1)

    def out_neighbors(self, v: int) -> list[int]:
        return sorted(w for u, w in self.arcs if u == v)

    def has_self_loop(self) -> bool:
        return any(u == v for u, v in self.arcs)

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.arcs)
        return g


def read_edge_list(path: str | Path, n: int | None = None) -> DirectedGraph:
    """Parse "u v" lines; blank lines and '#' comments are skipped."""
    arcs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'u v', got {line!r}")
        arcs.append((int(parts[0]), int(parts[1])))
    size = n if n is not None else (max((max(a) for a in arcs), default=-1) + 1)
    return DirectedGraph(size, tuple(dict.fromkeys(arcs)), name=Path(path).stem)


def _acyclic_without(g: nx.DiGraph, arcs=(), vertices=()) -> bool:
    h = g.copy()
    h.remove_edges_from(arcs)
    h.remove_nodes_from(vertices)
    return nx.is_directed_acyclic_graph(h)


def _cheapest_cycle(g: nx.DiGraph, removable: set) -> list[tuple[int, int]] | None:
    """A cycle with the fewest removable arcs, as its arc list; None if acyclic."""
    best: tuple[int, list] | None = None
    for u, v in sorted(removable):
        if not g.has_edge(u, v):
            continue
        try:
            cost, path = nx.single_source_dijkstra(
                g, v, u, weight=lambda x, y, _d: 1 if (x, y) in removable else 0
            )
        except nx.NetworkXNoPath:
            continue
        if best is None or cost + 1 < best[0]:
            best = (cost + 1, [(u, v)] + list(zip(path, path[1:])))
            if best[0] == 1:
                break
    if best is None and not nx.is_directed_acyclic_graph(g):
        return []  # only fixed arcs left on some cycle
    return None if best is None else best[1]


def _packing_bound(g: nx.DiGraph, removable: set) -> float:
    """Number of cycles found that share no removable arc; INF if a cycle has none."""
    h = g.copy()
    count = 0
    while True:
        cyc = _cheapest_cycle(h, removable)
        if cyc is None:
            return count
        if not cyc or not any(a in removable for a in cyc):
            return INF
        count += 1
        h.remove_edges_from([a for a in cyc if a in removable])


def _exact_fas_component(g: nx.DiGraph, removable: set) -> list[tuple[int, int]]:
    """Branch on the removable arcs of a cheapest cycle, deepening the budget."""
    removable = {a for a in removable if g.has_edge(*a)}

    def search(h: nx.DiGraph, allowed: set, budget: int) -> list | None:
        cyc = _cheapest_cycle(h, allowed)
        if cyc is None:
            return []
        options = [a for a in cyc if a in allowed]
        if budget == 0 or not options or _packing_bound(h, allowed) > budget:
            return None
        tried: set = set()
        for arc in options:
            h.remove_edge(*arc)
            rest = search(h, allowed - tried - {arc}, budget - 1)
            h.add_edge(*arc)
            if rest is not None:
                return [arc] + rest
            tried.add(arc)
        return None

    lb = _packing_bound(g, removable)
    if lb == INF:
        raise FeedbackError("a cycle uses only infinite-weight arcs")
    for k in range(int(lb), len(removable) + 1):
        found = search(g, set(removable), k)
        if found is not None:
            return found
    raise FeedbackError("no feedback arc set within the removable arcs")


def feedback_arc_set(graph: DirectedGraph, mode: FeedbackMode = FeedbackMode.EXACT) -> list[tuple[int, int]]:
    """Arcs of finite weight whose removal leaves the graph acyclic.

    Exact mode returns one of minimum cardinality, scanning subsets by size.
    Greedy mode repeatedly drops the finite arc lying on the most cycles
    among a bounded sample.
    """
    g = graph.to_networkx()
    finite = [a for a in graph.arcs if graph.weight(a) != INF]
    if not _acyclic_without(g, arcs=finite):
        raise FeedbackError("a cycle uses only infinite-weight arcs")
    if mode is FeedbackMode.EXACT:
        out: list[tuple[int, int]] = []
        for comp in nx.strongly_connected_components(g):
            if len(comp) > 1:
                out.extend(_exact_fas_component(g.subgraph(comp).copy(), set(finite)))
        return sorted(out)
    removed: list[tuple[int, int]] = []
    finite_set = set(finite)
    while not nx.is_directed_acyclic_graph(g):
        hits: dict[tuple[int, int], int] = {}
        for cyc in itertools.islice(nx.simple_cycles(g), 500):
            for k in range(len(cyc)):
                arc = (cyc[k], cyc[(k + 1) % len(cyc)])
                if arc in finite_set:
                    hits[arc] = hits.get(arc, 0) + 1
        best = min(hits, key=lambda a: (-hits[a], a))
        g.remove_edge(*best)
        removed.append(best)
    return removed


def feedback_vertex_set(graph: DirectedGraph, mode: FeedbackMode = FeedbackMode.EXACT) -> list[int]:
    """Vertices whose removal leaves the graph acyclic (minimum size in exact mode)."""
    g = graph.to_networkx()
    if mode is FeedbackMode.EXACT:
        for k in range(graph.n + 1):
            for combo in itertools.combinations(range(graph.n), k):
                if _acyclic_without(g, vertices=combo):
                    return list(combo)
    removed: list[int] = []
    while not nx.is_directed_acyclic_graph(g):
        hits: dict[int, int] = {}
        for cyc in itertools.islice(nx.simple_cycles(g), 500):
            for v in cyc:
                hits[v] = hits.get(v, 0) + 1
        best = min(hits, key=lambda v: (-hits[v], v))
        g.remove_node(best)
        removed.append(best)
    return removed
