"""Slow reference implementations used as independent oracles in tests.

Everything here works by exhaustive enumeration over permutations and query
subsets and shares no search logic with the package.
"""
from __future__ import annotations

import itertools

from matchprobe import CertTarget, Instance, Matching, PreferenceProfile, Realization


def prefers(row, x, y) -> bool:
    return row.index(x) < row.index(y)


def blocking(a_prefs, b_prefs, pairs) -> list[tuple[int, int]]:
    n = len(pairs)
    inv = {j: i for i, j in enumerate(pairs)}
    out = []
    for i in range(n):
        for j in range(n):
            if pairs[i] != j and prefers(a_prefs[i], j, pairs[i]) and prefers(b_prefs[j], i, inv[j]):
                out.append((i, j))
    return out


def stable_set(a_prefs, b_prefs) -> list[tuple[int, ...]]:
    n = len(a_prefs)
    return [p for p in itertools.permutations(range(n)) if not blocking(a_prefs, b_prefs, p)]


def a_best(a_prefs, b_prefs) -> tuple[int, ...]:
    """The stable matching every A agent weakly prefers, found by enumeration."""
    ms = stable_set(a_prefs, b_prefs)
    for m in ms:
        if all(all(a_prefs[i].index(m[i]) <= a_prefs[i].index(o[i]) for i in range(len(m))) for o in ms):
            return m
    raise AssertionError("no A-optimal matching")


def b_best(a_prefs, b_prefs) -> tuple[int, ...]:
    ms = stable_set(a_prefs, b_prefs)
    for m in ms:
        inv = {j: i for i, j in enumerate(m)}
        ok = True
        for o in ms:
            oinv = {j: i for i, j in enumerate(o)}
            if any(b_prefs[j].index(inv[j]) > b_prefs[j].index(oinv[j]) for j in range(len(m))):
                ok = False
        if ok:
            return m
    raise AssertionError("no B-optimal matching")


def completions(n: int, rels: dict[int, set[tuple[int, int]]]):
    per_b = []
    for j in range(n):
        rows = [p for p in itertools.permutations(range(n)) if all(prefers(p, x, y) for x, y in rels.get(j, ()))]
        per_b.append(rows)
    return itertools.product(*per_b)


def closure(rels: set[tuple[int, int]]) -> set[tuple[int, int]]:
    out = set(rels)
    changed = True
    while changed:
        changed = False
        for x, y in list(out):
            for y2, z in list(out):
                if y == y2 and (x, z) not in out:
                    out.add((x, z))
                    changed = True
    return out


def holds(a_prefs, b_prefs, pairs, target: CertTarget) -> bool:
    if blocking(a_prefs, b_prefs, pairs):
        return False
    if target is CertTarget.STABLE_B_OPTIMAL:
        return b_best(a_prefs, b_prefs) == tuple(pairs)
    if target is CertTarget.STABLE_A_OPTIMAL:
        return a_best(a_prefs, b_prefs) == tuple(pairs)
    return True


def certified(a_prefs, rels, pairs, target) -> bool:
    n = len(a_prefs)
    return all(holds(a_prefs, rows, pairs, target) for rows in completions(n, rels))


def comparison_answers(b_prefs):
    """Every comparison query with its true answer, as (b, winner, loser)."""
    n = len(b_prefs)
    out = []
    for j in range(n):
        for x, y in itertools.combinations(range(n), 2):
            w, l = (x, y) if prefers(b_prefs[j], x, y) else (y, x)
            out.append((j, {(w, l)}))
    return out


def set_answers(b_prefs):
    n = len(b_prefs)
    out = []
    for j in range(n):
        for k in range(2, n + 1):
            for s in itertools.combinations(range(n), k):
                t = min(s, key=b_prefs[j].index)
                out.append((j, {(t, x) for x in s if x != t}))
    return out


def min_cert(a_prefs, b_prefs, pairs, target: CertTarget, model: str = "comparison") -> int:
    """Smallest subset of truthfully answered queries that certifies ``target`` for ``pairs``."""
    universe = comparison_answers(b_prefs) if model == "comparison" else set_answers(b_prefs)
    for size in range(len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            rels: dict[int, set] = {}
            for j, r in combo:
                rels.setdefault(j, set()).update(r)
            if certified(a_prefs, rels, pairs, target):
                return size
    raise AssertionError("full information does not certify the target")


def instance_tables(inst: Instance):
    return inst.profile.a_prefs, inst.require_realization().b_prefs


def make(a_prefs, b_prefs, pairs=None, label="") -> Instance:
    return Instance(
        PreferenceProfile(tuple(map(tuple, a_prefs))),
        Realization(tuple(map(tuple, b_prefs))),
        Matching(tuple(pairs)) if pairs is not None else None,
        label,
    )


def proposal_contests(a_prefs, b_prefs) -> int:
    """Sum over b of (proposals received - 1) in A-proposing deferred acceptance, lowest free index first."""
    n = len(a_prefs)
    nxt = [0] * n
    holder: dict[int, int] = {}
    received = [0] * n
    free = list(range(n))
    while free:
        i = min(free)
        free.remove(i)
        j = a_prefs[i][nxt[i]]
        nxt[i] += 1
        received[j] += 1
        if j not in holder:
            holder[j] = i
        elif prefers(b_prefs[j], i, holder[j]):
            free.append(holder[j])
            holder[j] = i
        else:
            free.append(i)
    return sum(max(r - 1, 0) for r in received)
