"""Adaptive answer source for the Omega(n) lower-bound construction.

B_1 lists and the middle block of every B_2 list are fixed.  What stays open
is, for each a_i in A_1, the agent b_{t(i)} in B_2 that ranks a_i above its
partner.  A query touching a_i at b_j in B_2 marks j as hit for a_i; as long
as some B_2 agent remains unhit, a_i is placed behind at b_j.  The hit that
covers the last B_2 agent commits t(i) = j.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .fixtures import fig1_b1_list, fig1_b2_list, fig1_profile, fig1_realization, fronts_from_targets
from .model import Instance, Matching, MatchprobeError, PreferenceProfile, Realization
from .oracles import AnswerSource


class AdversaryError(MatchprobeError):
    """The adversary's final realization disagrees with an answer it gave."""


class Fig1Adversary(AnswerSource):
    """Answers comparison, set or interview queries on the FIG1-n profile.

    Comparison and set queries hit every A_1 agent they name; an interview
    hits only the newly interviewed agent.
    """

    def __init__(self, n: int):
        self.profile: PreferenceProfile = fig1_profile(n)
        self.n = n
        self.half = n // 2
        self.hits: list[set[int]] = [set() for _ in range(self.half)]
        self.t: dict[int, int] = {}
        self.answered: list[tuple[int, tuple[int, ...]]] = []  # (b, agents best first)

    # -- state machine ------------------------------------------------------

    def _touch(self, j: int, agents: Iterable[int]) -> None:
        if j < self.half:
            return
        b2 = set(range(self.half, self.n))
        for i in agents:
            if i >= self.half or i in self.t:
                continue
            self.hits[i].add(j)
            if self.hits[i] >= b2:
                self.t[i] = j

    def current_list(self, j: int) -> tuple[int, ...]:
        if j < self.half:
            return fig1_b1_list(self.n, j)
        front = [i for i, tj in self.t.items() if tj == j]
        return fig1_b2_list(self.n, j, front)

    def _order(self, j: int, agents: Iterable[int]) -> tuple[int, ...]:
        pos = {x: k for k, x in enumerate(self.current_list(j))}
        out = tuple(sorted(set(agents), key=pos.__getitem__))
        self.answered.append((j, out))
        return out

    # -- AnswerSource -------------------------------------------------------------

    def prefer(self, b: int, x: int, y: int) -> int:
        self._touch(b, (x, y))
        return self._order(b, (x, y))[0]

    def top(self, b: int, s: Sequence[int]) -> int:
        self._touch(b, s)
        return self._order(b, s)[0]

    def interview(self, b: int, a: int, prefix: Sequence[int]) -> tuple[int, ...]:
        self._touch(b, (a,))
        return self._order(b, tuple(prefix) + (a,))

    # -- finishing --------------------------------------------------------------

    def targets(self) -> dict[int, int]:
        """t(i) for every A_1 agent; unhit agents take the lowest unhit B_2 index."""
        out = dict(self.t)
        for i in range(self.half):
            if i not in out:
                out[i] = min(j for j in range(self.half, self.n) if j not in self.hits[i])
        return out

    def finalize(self) -> Realization:
        real = fig1_realization(self.n, fronts_from_targets(self.n, self.targets()))
        for j, order in self.answered:
            rank = real.b_rank[j]
            if any(rank[x] > rank[y] for x, y in zip(order, order[1:])):
                raise AdversaryError(f"b_{j}: answered {order}, final list {real.b_prefs[j]}")
        return real

    def instance(self) -> Instance:
        return Instance(self.profile, self.finalize(), Matching.identity(self.n), f"FIG1-{self.n}-adaptive")


def fig1_answer(state: Fig1Adversary, b: int, x: int, y: int) -> int:
    return state.prefer(b, x, y)


def fig1_finalize(state: Fig1Adversary) -> Realization:
    return state.finalize()


def forced_hits(state: Fig1Adversary) -> int:
    """Number of (a_i, b_j) hits recorded for A_1 agents at B_2 agents."""
    return sum(len(h) for h in state.hits)
