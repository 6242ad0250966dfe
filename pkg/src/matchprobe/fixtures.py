"""Canonical named instances and random instance generators.

Every "arbitrary order" slot is filled by increasing index so that runs are
reproducible.
"""
from __future__ import annotations

import random
from typing import Mapping, Sequence

from .model import Instance, Matching, PreferenceProfile, Realization


def _top_then_rest(n: int, top: int) -> tuple[int, ...]:
    return (top,) + tuple(x for x in range(n) if x != top)


def fix_id(n: int) -> Instance:
    """Everyone's partner of the same index is their top choice."""
    rows = tuple(_top_then_rest(n, i) for i in range(n))
    return Instance(PreferenceProfile(rows), Realization(rows), Matching.identity(n), f"FIX-ID({n})")


def fix_rot2() -> Instance:
    """n=2 with one rotation between the A-optimal and B-optimal matchings."""
    return Instance(
        PreferenceProfile(((0, 1), (1, 0))),
        Realization(((1, 0), (0, 1))),
        None,
        "FIX-ROT2",
    )


def fix_swap2() -> Instance:
    return Instance(
        PreferenceProfile(((0, 1), (0, 1))),
        Realization(((1, 0), (0, 1))),
        None,
        "FIX-SWAP2",
    )


def fix_eq(n: int) -> Instance:
    """All A-rows identical; every b ranks A in reverse index order."""
    row = tuple(range(n))
    rev = tuple(range(n - 1, -1, -1))
    return Instance(
        PreferenceProfile(tuple(row for _ in range(n))),
        Realization(tuple(rev for _ in range(n))),
        None,
        f"FIX-EQ({n})",
    )


def fix_2sided() -> Instance:
    """The 2x2 two-sided verification instance with M = {(a_0,b_0),(a_1,b_1)}.

    Each b prefers the other a to its partner while each a prefers its
    partner, so a B-first prober needs two queries per non-matching pair and
    an A-side-only certificate needs one.
    """
    return Instance(
        PreferenceProfile(((0, 1), (1, 0))),
        Realization(((1, 0), (0, 1))),
        Matching.identity(2),
        "FIX-2SIDED",
    )


# -- the lower-bound construction -------------------------------------------


def fig1_profile(n: int) -> PreferenceProfile:
    """Known A-side lists of the Omega(n) lower-bound construction (n % 4 == 0)."""
    if n < 4 or n % 4:
        raise ValueError(f"figure-1 construction needs n divisible by 4, got {n}")
    half = n // 2
    b2 = tuple(range(half, n))
    rows = []
    for i in range(n):
        if i < half:
            rest = tuple(j for j in range(half) if j != i)
            rows.append((i,) + b2 + rest)
        elif i < n - 1:
            rest = tuple(j for j in range(n) if j not in (i, n - 1))
            rows.append((i, n - 1) + rest)
        else:
            rows.append(_top_then_rest(n, n - 1))
    return PreferenceProfile(tuple(rows))


def fig1_b1_list(n: int, j: int) -> tuple[int, ...]:
    """Fixed list of b_j in B_1: b_{2k} starts (a_{2k+1}, a_{2k}), b_{2k+1} starts (a_{2k}, a_{2k+1})."""
    first, second = (j - 1, j) if j % 2 else (j + 1, j)
    return (first, second) + tuple(x for x in range(n) if x not in (first, second))


def fig1_middle(n: int, j: int) -> tuple[int, ...]:
    """Order of A_2 and a_{n-1} inside b_j's list for b_j in B_2."""
    half = n // 2
    block = list(range(half, n))
    if j == n - 1:
        return tuple(block)
    k = block.index(j)
    return tuple(block[k:] + block[:k])


def fig1_b2_list(n: int, j: int, front: Sequence[int]) -> tuple[int, ...]:
    """b_j in B_2: the A_1 agents in ``front`` first, then the middle block, then the other A_1 agents."""
    half = n // 2
    front = sorted(front)
    back = [i for i in range(half) if i not in front]
    return tuple(front) + fig1_middle(n, j) + tuple(back)


def fig1_realization(n: int, fronts: Mapping[int, Sequence[int]]) -> Realization:
    """B-side lists given, for each b_j in B_2, the A_1 agents placed in front of a_j."""
    half = n // 2
    rows = [fig1_b1_list(n, j) for j in range(half)]
    rows += [fig1_b2_list(n, j, fronts.get(j, ())) for j in range(half, n)]
    return Realization(tuple(rows))


def fronts_from_targets(n: int, t: Mapping[int, int]) -> dict[int, list[int]]:
    fronts: dict[int, list[int]] = {}
    for i, j in sorted(t.items()):
        fronts.setdefault(j, []).append(i)
    return fronts


def fig1_static(n: int) -> Instance:
    """FIG1-n with every A_1 agent's r-edge going to b_{n-1}."""
    t = {i: n - 1 for i in range(n // 2)}
    return Instance(
        fig1_profile(n),
        fig1_realization(n, fronts_from_targets(n, t)),
        Matching.identity(n),
        f"FIG1-{n}",
    )


def gen_fig1_randomized(n: int, seed: int) -> Instance:
    """One draw from the randomized lower-bound family.

    For each odd i < n/2 one tuple (a_k, b_j), k in {i-1, i}, b_j in B_2, is
    drawn uniformly; only that b_j ranks a_k above its partner.
    """
    profile = fig1_profile(n)
    rng = random.Random(seed)
    half = n // 2
    fronts: dict[int, list[int]] = {}
    for i in range(1, half, 2):
        k = rng.choice((i - 1, i))
        j = rng.randrange(half, n)
        fronts.setdefault(j, []).append(k)
    return Instance(profile, fig1_realization(n, fronts), Matching.identity(n), f"FIG1R-{n}-s{seed}")


# -- random instances -----------------------------------------------------------


def random_instance(n: int, rng: random.Random | int, label: str | None = None) -> Instance:
    """Uniformly random complete preferences on both sides."""
    if not isinstance(rng, random.Random):
        seed = rng
        rng = random.Random(seed)
        label = label or f"random-n{n}-s{seed}"

    def perm() -> tuple[int, ...]:
        p = list(range(n))
        rng.shuffle(p)
        return tuple(p)

    a_rows = tuple(perm() for _ in range(n))
    b_rows = tuple(perm() for _ in range(n))
    return Instance(PreferenceProfile(a_rows), Realization(b_rows), None, label or f"random-n{n}")
