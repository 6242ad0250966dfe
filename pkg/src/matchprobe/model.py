"""Agents, preference profiles, matchings and the instance file format.

Agents are identified by 0-based indices on each side.  A-side preference
lists are always known; the B-side lists (the *realization*) may be hidden,
in which case any full-information helper raises ``HiddenPreferenceError``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence


class MatchprobeError(Exception):
    """Base class for library errors."""


class HiddenPreferenceError(MatchprobeError):
    """Raised when code reads B-side preferences that are not available."""


class InstanceFormatError(MatchprobeError, ValueError):
    """Raised when an instance document or preference table is malformed."""


class Side(enum.Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Side":
        return Side.B if self is Side.A else Side.A


class AgentId(NamedTuple):
    side: Side
    index: int

    def __str__(self) -> str:
        return f"{self.side.value.lower()}_{self.index}"


def a(i: int) -> AgentId:
    return AgentId(Side.A, i)


def b(j: int) -> AgentId:
    return AgentId(Side.B, j)


def _validate_table(rows: Sequence[Sequence[int]], n: int, what: str) -> tuple[tuple[int, ...], ...]:
    if len(rows) != n:
        raise InstanceFormatError(f"{what}: expected {n} rows, got {len(rows)}")
    out = []
    for i, row in enumerate(rows):
        row = tuple(row)
        if len(row) != n:
            raise InstanceFormatError(f"{what}[{i}]: expected {n} entries, got {len(row)}")
        seen: dict[int, int] = {}
        for pos, x in enumerate(row):
            if not isinstance(x, int) or isinstance(x, bool):
                raise InstanceFormatError(f"{what}[{i}][{pos}]: not an integer: {x!r}")
            if not 0 <= x < n:
                raise InstanceFormatError(f"{what}[{i}][{pos}]: index {x} out of range [0, {n})")
            if x in seen:
                raise InstanceFormatError(
                    f"{what}[{i}][{pos}]: duplicate index {x} (first at position {seen[x]})"
                )
            seen[x] = pos
        out.append(row)
    return tuple(out)


def _rank_table(rows: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    n = len(rows)
    table = []
    for row in rows:
        r = [0] * n
        for pos, x in enumerate(row):
            r[x] = pos
        table.append(tuple(r))
    return tuple(table)


@dataclass(frozen=True)
class PreferenceProfile:
    """Known A-side lists; ``a_prefs[i][0]`` is a_i's top choice."""

    a_prefs: tuple[tuple[int, ...], ...]
    a_rank: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.a_prefs) == 0:
            raise InstanceFormatError("a_prefs: n must be positive")
        rows = _validate_table(self.a_prefs, len(self.a_prefs), "a_prefs")
        object.__setattr__(self, "a_prefs", rows)
        object.__setattr__(self, "a_rank", _rank_table(rows))

    @property
    def n(self) -> int:
        return len(self.a_prefs)

    def prefers(self, i: int, x: int, y: int) -> bool:
        """True if a_i ranks b_x above b_y."""
        return self.a_rank[i][x] < self.a_rank[i][y]

    def above(self, i: int, j: int) -> tuple[int, ...]:
        """B-agents a_i ranks strictly above b_j, best first."""
        return self.a_prefs[i][: self.a_rank[i][j]]

    def below(self, i: int, j: int) -> tuple[int, ...]:
        """B-agents a_i ranks strictly below b_j, best first."""
        return self.a_prefs[i][self.a_rank[i][j] + 1 :]


@dataclass(frozen=True)
class Realization:
    """The B-side lists; ``b_prefs[j]`` is b_j's order over A."""

    b_prefs: tuple[tuple[int, ...], ...]
    b_rank: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.b_prefs) == 0:
            raise InstanceFormatError("b_prefs: n must be positive")
        rows = _validate_table(self.b_prefs, len(self.b_prefs), "b_prefs")
        object.__setattr__(self, "b_prefs", rows)
        object.__setattr__(self, "b_rank", _rank_table(rows))

    @property
    def n(self) -> int:
        return len(self.b_prefs)

    def prefers(self, j: int, x: int, y: int) -> bool:
        """True if b_j ranks a_x above a_y."""
        return self.b_rank[j][x] < self.b_rank[j][y]


@dataclass(frozen=True)
class Matching:
    """``pairs[i]`` is the B-index matched to a_i."""

    pairs: tuple[int, ...]
    inverse: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pairs = tuple(self.pairs)
        n = len(pairs)
        inv = [-1] * n
        for i, j in enumerate(pairs):
            if not isinstance(j, int) or not 0 <= j < n:
                raise InstanceFormatError(f"matching[{i}]: index {j!r} out of range [0, {n})")
            if inv[j] != -1:
                raise InstanceFormatError(f"matching[{i}]: b_{j} already matched to a_{inv[j]}")
            inv[j] = i
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "inverse", tuple(inv))

    @classmethod
    def identity(cls, n: int) -> "Matching":
        return cls(tuple(range(n)))

    @classmethod
    def from_pairs(cls, edges: Sequence[tuple[int, int]]) -> "Matching":
        pairs = [-1] * len(edges)
        for i, j in edges:
            pairs[i] = j
        return cls(tuple(pairs))

    @property
    def n(self) -> int:
        return len(self.pairs)

    def of_a(self, i: int) -> int:
        return self.pairs[i]

    def of_b(self, j: int) -> int:
        return self.inverse[j]

    def edges(self) -> list[tuple[int, int]]:
        return list(enumerate(self.pairs))

    def __str__(self) -> str:
        return "{" + ", ".join(f"(a_{i},b_{j})" for i, j in enumerate(self.pairs)) + "}"


@dataclass(frozen=True)
class Instance:
    profile: PreferenceProfile
    realization: Realization | None = None
    matching: Matching | None = None
    label: str = ""

    def __post_init__(self) -> None:
        n = self.profile.n
        if self.realization is not None and self.realization.n != n:
            raise InstanceFormatError(f"b_prefs: expected {n} rows, got {self.realization.n}")
        if self.matching is not None and self.matching.n != n:
            raise InstanceFormatError(f"matching: expected length {n}, got {self.matching.n}")

    @property
    def n(self) -> int:
        return self.profile.n

    def require_realization(self) -> Realization:
        if self.realization is None:
            raise HiddenPreferenceError(
                f"instance {self.label or '<unnamed>'}: B-side preferences are hidden; "
                "use a query oracle"
            )
        return self.realization

    def hidden(self) -> "Instance":
        """Copy with the realization removed."""
        return Instance(self.profile, None, self.matching, self.label)

    def with_matching(self, matching: Matching | None) -> "Instance":
        return Instance(self.profile, self.realization, matching, self.label)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        doc: dict = {"label": self.label, "n": self.n, "a_prefs": [list(r) for r in self.profile.a_prefs]}
        if self.realization is not None:
            doc["b_prefs"] = [list(r) for r in self.realization.b_prefs]
        if self.matching is not None:
            doc["matching"] = list(self.matching.pairs)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        if not isinstance(doc, dict):
            raise InstanceFormatError("instance document must be a JSON object")
        for key in ("n", "a_prefs"):
            if key not in doc:
                raise InstanceFormatError(f"missing required field {key!r}")
        n = doc["n"]
        if not isinstance(n, int) or n <= 0:
            raise InstanceFormatError(f"n: must be a positive integer, got {n!r}")
        a_rows = _validate_table(doc["a_prefs"], n, "a_prefs")
        realization = None
        if doc.get("b_prefs") is not None:
            realization = Realization(_validate_table(doc["b_prefs"], n, "b_prefs"))
        matching = None
        if doc.get("matching") is not None:
            m = doc["matching"]
            if len(m) != n:
                raise InstanceFormatError(f"matching: expected length {n}, got {len(m)}")
            matching = Matching(tuple(m))
        return cls(PreferenceProfile(a_rows), realization, matching, str(doc.get("label", "")))

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "Instance":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Instance":
        return cls.loads(Path(path).read_text())


def rank(source: PreferenceProfile | Realization | Instance, agent: AgentId, other: AgentId) -> int:
    """Position of ``other`` in ``agent``'s list (0 = most preferred)."""
    if agent.side == other.side:
        raise ValueError(f"{agent} and {other} are on the same side")
    if isinstance(source, Instance):
        if agent.side is Side.A:
            return source.profile.a_rank[agent.index][other.index]
        return source.require_realization().b_rank[agent.index][other.index]
    if agent.side is Side.A:
        if not isinstance(source, PreferenceProfile):
            raise HiddenPreferenceError(f"no A-side lists available for {agent}")
        return source.a_rank[agent.index][other.index]
    if not isinstance(source, Realization):
        raise HiddenPreferenceError(f"B-side list of {agent} is hidden; use a query oracle")
    return source.b_rank[agent.index][other.index]


# -- full-information oracles ------------------------------------------------


def deferred_acceptance(
    proposer_prefs: Sequence[Sequence[int]], receiver_rank: Sequence[Sequence[int]]
) -> list[int]:
    """Proposer-optimal stable matching; returns ``match[proposer] = receiver``.

    Free proposers are served lowest index first.
    """
    n = len(proposer_prefs)
    next_choice = [0] * n
    held = [-1] * n  # receiver -> proposer
    free = list(range(n - 1, -1, -1))  # stack, lowest index on top
    while free:
        p = free.pop()
        r = proposer_prefs[p][next_choice[p]]
        next_choice[p] += 1
        cur = held[r]
        if cur == -1:
            held[r] = p
        elif receiver_rank[r][p] < receiver_rank[r][cur]:
            held[r] = p
            _push_sorted(free, cur)
        else:
            _push_sorted(free, p)
    match = [-1] * n
    for r, p in enumerate(held):
        match[p] = r
    return match


def _push_sorted(stack: list[int], x: int) -> None:
    # stack is kept in decreasing order so pop() yields the lowest index
    k = len(stack)
    while k > 0 and stack[k - 1] < x:
        k -= 1
    stack.insert(k, x)


def a_optimal_matching(instance: Instance) -> Matching:
    real = instance.require_realization()
    return Matching(tuple(deferred_acceptance(instance.profile.a_prefs, real.b_rank)))


def b_optimal_matching(instance: Instance) -> Matching:
    real = instance.require_realization()
    b_to_a = deferred_acceptance(real.b_prefs, instance.profile.a_rank)
    pairs = [-1] * instance.n
    for j, i in enumerate(b_to_a):
        pairs[i] = j
    return Matching(tuple(pairs))


def is_blocking_pair(instance: Instance, m: Matching, i: int, j: int) -> bool:
    real = instance.require_realization()
    if m.of_a(i) == j:
        return False
    return instance.profile.prefers(i, j, m.of_a(i)) and real.prefers(j, i, m.of_b(j))


def blocking_pairs(instance: Instance, m: Matching) -> list[tuple[int, int]]:
    n = instance.n
    return [(i, j) for i in range(n) for j in range(n) if is_blocking_pair(instance, m, i, j)]


def is_stable(instance: Instance, m: Matching) -> bool:
    real = instance.require_realization()
    prof = instance.profile
    for i in range(instance.n):
        for j in prof.above(i, m.of_a(i)):
            if real.prefers(j, i, m.of_b(j)):
                return False
    return True


def all_matchings(n: int) -> Iterator[Matching]:
    from itertools import permutations

    for perm in permutations(range(n)):
        yield Matching(perm)


def stable_matchings(instance: Instance) -> list[Matching]:
    """Every stable matching, by exhaustive enumeration (small n only)."""
    return [m for m in all_matchings(instance.n) if is_stable(instance, m)]


def potential_blockers(profile: PreferenceProfile, m: Matching, j: int) -> list[int]:
    """A-agents that rank b_j above their partner (the set Z(b_j))."""
    return [i for i in range(profile.n) if i != m.of_b(j) and profile.prefers(i, j, m.of_a(i))]


def stability_query_count(profile: PreferenceProfile, m: Matching) -> int:
    """Sum over a of the number of b ranked above M(a)."""
    return sum(profile.a_rank[i][m.of_a(i)] for i in range(profile.n))
