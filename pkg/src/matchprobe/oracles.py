"""Comparison, interview and set queries against a hidden answer source.

An :class:`Oracle` wraps an :class:`AnswerSource` (a fixed realization or an
adaptive adversary), counts every issued query, keeps a transcript and folds
each answer into a :class:`KnowledgeState`.
"""
from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .knowledge import KnowledgeState
from .model import AgentId, Realization, Side


class QueryModel(enum.Enum):
    COMPARISON = "comparison"
    INTERVIEW = "interview"
    SET = "set"


@dataclass(frozen=True)
class Query:
    model: QueryModel
    agent: AgentId
    payload: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.model is QueryModel.SET and not self.payload:
            raise ValueError("set query needs a non-empty set")
        if self.model is QueryModel.COMPARISON and (
            len(self.payload) != 2 or self.payload[0] == self.payload[1]
        ):
            raise ValueError("comparison query needs two distinct agents")
        if self.model is QueryModel.INTERVIEW and len(self.payload) != 1:
            raise ValueError("interview query names one agent")


@dataclass
class Transcript:
    entries: list[tuple[Query, object]] = field(default_factory=list)
    counts: Counter = field(default_factory=Counter)

    def record(self, query: Query, answer: object) -> None:
        self.entries.append((query, answer))
        self.counts[query.model] += 1

    def __len__(self) -> int:
        return len(self.entries)

    def count(self, model: QueryModel | None = None) -> int:
        return len(self.entries) if model is None else self.counts[model]

    def to_jsonl(self) -> str:
        lines = []
        for q, ans in self.entries:
            payload = list(q.payload) if q.model is not QueryModel.INTERVIEW else q.payload[0]
            doc = {"model": q.model.value, "b": q.agent.index, "payload": payload,
                   "answer": list(ans) if isinstance(ans, tuple) else ans}
            if q.agent.side is Side.A:
                doc["side"] = "A"
            lines.append(json.dumps(doc))
        return "\n".join(lines) + ("\n" if lines else "")


class AnswerSource:
    """Something that can answer B-side queries; subclasses override the three methods."""

    n: int

    def prefer(self, b: int, x: int, y: int) -> int:
        raise NotImplementedError

    def top(self, b: int, s: Sequence[int]) -> int:
        raise NotImplementedError

    def interview(self, b: int, a: int, prefix: Sequence[int]) -> tuple[int, ...]:
        """Order of ``prefix`` plus ``a`` at b, best first."""
        raise NotImplementedError


class RealizationSource(AnswerSource):
    """Answers read off a fixed realization."""

    def __init__(self, realization: Realization):
        self.realization = realization
        self.n = realization.n

    def prefer(self, b: int, x: int, y: int) -> int:
        return x if self.realization.prefers(b, x, y) else y

    def top(self, b: int, s: Sequence[int]) -> int:
        return min(s, key=self.realization.b_rank[b].__getitem__)

    def interview(self, b: int, a: int, prefix: Sequence[int]) -> tuple[int, ...]:
        agents = set(prefix) | {a}
        return tuple(sorted(agents, key=self.realization.b_rank[b].__getitem__))


class Oracle:
    """Counting query interface over one answer source.

    ``side`` only labels the transcript; the two-sided verifier uses one
    oracle per side.
    """

    def __init__(self, source: AnswerSource | Realization, side: Side = Side.B):
        if isinstance(source, Realization):
            source = RealizationSource(source)
        self.source = source
        self.side = side
        self.n = source.n
        self.knowledge = KnowledgeState.empty(self.n)
        self.transcript = Transcript()
        self._prefix: list[list[int]] = [[] for _ in range(self.n)]

    @property
    def count(self) -> int:
        return len(self.transcript)

    def prefer(self, b: int, x: int, y: int) -> int:
        q = Query(QueryModel.COMPARISON, AgentId(self.side, b), (x, y))
        ans = self.source.prefer(b, x, y)
        if ans not in (x, y):
            raise ValueError(f"source answered {ans} to {q}")
        self.knowledge = self.knowledge.with_relation(b, ans, y if ans == x else x)
        self.transcript.record(q, ans)
        return ans

    def top(self, b: int, s: Iterable[int]) -> int:
        s = tuple(sorted(set(s)))
        q = Query(QueryModel.SET, AgentId(self.side, b), s)
        ans = self.source.top(b, s)
        if ans not in s:
            raise ValueError(f"source answered {ans} to {q}")
        self.knowledge = self.knowledge.with_top(b, ans, s)
        self.transcript.record(q, ans)
        return ans

    def interview(self, b: int, a: int) -> tuple[int, ...]:
        q = Query(QueryModel.INTERVIEW, AgentId(self.side, b), (a,))
        prefix = self._prefix[b]
        if a in prefix:
            pmask = sum(1 << x for x in prefix)
            k = self.knowledge
            order = tuple(sorted(prefix, key=lambda x: -bin(k.worse_mask(b, x) & pmask).count("1")))
        else:
            order = tuple(self.source.interview(b, a, tuple(prefix)))
            if sorted(order) != sorted(prefix + [a]):
                raise ValueError(f"source answered {order} to {q}")
            self.knowledge = self.knowledge.with_order(b, order)
            prefix.append(a)
        self.transcript.record(q, order)
        return order

    def interviewed(self, b: int) -> tuple[int, ...]:
        return tuple(self._prefix[b])


def query_prefer(oracle: Oracle, b: int, x: int, y: int) -> int:
    return oracle.prefer(b, x, y)


def query_top(oracle: Oracle, b: int, s: Iterable[int]) -> int:
    return oracle.top(b, s)


def query_interview(oracle: Oracle, b: int, a: int) -> tuple[int, ...]:
    return oracle.interview(b, a)
