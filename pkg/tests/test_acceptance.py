"""Acceptance criteria, one test each.  Every test prints a single PASS/FAIL line."""
import math
import random

import networkx as nx
import pytest

from naive import a_best, b_best, blocking, instance_tables, min_cert, proposal_contests

from matchprobe import CertTarget, Matching, Oracle, Realization, Side, b_optimal_matching, stable_matchings
from matchprobe.adversary import Fig1Adversary
from matchprobe.fixtures import fix_2sided, fix_eq, random_instance
from matchprobe.graphs import DirectedGraph, feedback_arc_set
from matchprobe.knowledge import certifies_b_optimal
from matchprobe.model import potential_blockers, stability_query_count
from matchprobe.offline import CertificateProblem, certify_b_optimal_offline_set, fig1_certificate, gen_fas_reduction, min_certificate
from matchprobe.oracles import QueryModel
from matchprobe.solve import (
    find_a_optimal_comparison,
    find_a_optimal_interview,
    find_b_optimal_comparison,
    find_b_optimal_interview,
    find_stable_equal_prefs,
)
from matchprobe.verify import (
    B_OPTIMAL,
    STABLE,
    set_query_budget,
    verify_b_optimal_set,
    verify_stable_comparison,
    verify_stable_set,
    verify_stable_twosided,
)


@pytest.fixture
def check(capsys):
    def _check(num: int, title: str, failures: list[str], detail: str = "") -> None:
        status = "PASS" if not failures else "FAIL"
        with capsys.disabled():
            note = failures[0] if failures else detail
            print(f"\ncriterion {num:>2} {status}: {title}" + (f" ({note})" if note else ""))
        assert not failures, failures[:5]

    return _check


def _opt(model, target, inst, m=None):
    return min_certificate(CertificateProblem(model, target, inst, m)).size


def test_c01_verification_exactness(check):
    rng = random.Random(101)
    bad = []
    checked = 0
    for k in range(200):
        inst = random_instance(rng.randint(2, 5), rng)
        for m in stable_matchings(inst):
            got = verify_stable_comparison(inst.profile, m, inst.realization).queries
            q = stability_query_count(inst.profile, m)
            opt = _opt(QueryModel.COMPARISON, CertTarget.STABLE, inst, m)
            checked += 1
            if not got == q == opt:
                bad.append(f"instance {k}: alg {got}, Q {q}, opt {opt}")
    check(1, "verification exactness", bad, f"{checked} matchings")


def test_c02_a_optimal_one_competitive(check):
    rng = random.Random(102)
    bad = []
    for k in range(200):
        inst = random_instance(rng.randint(1, 5), rng)
        a_rows, b_rows = instance_tables(inst)
        r = find_a_optimal_comparison(inst.profile, inst.realization)
        kb = proposal_contests(a_rows, b_rows)
        opt = _opt(QueryModel.COMPARISON, CertTarget.STABLE, inst)
        if not (r.queries == kb == opt and r.matching.pairs == a_best(a_rows, b_rows)):
            bad.append(f"instance {k}: alg {r.queries}, sum k_b {kb}, opt {opt}")
    check(2, "A-optimal 1-competitiveness", bad)


def test_c03_equal_preferences(check):
    bad = []
    for n in range(2, 9):
        q = find_stable_equal_prefs(fix_eq(n).profile, fix_eq(n).realization).queries
        if q != (n * n - n) // 2:
            bad.append(f"n={n}: {q}")
    q4 = find_stable_equal_prefs(fix_eq(4).profile, fix_eq(4).realization).queries
    if q4 != 6:
        bad.append(f"n=4 gave {q4}")
    check(3, "equal-preference count", bad)


def test_c04_b_optimal_correctness_and_envelope(check):
    rng = random.Random(104)
    bad = []
    worst = 0.0
    for k in range(500):
        n = rng.randint(1, 8)
        inst = random_instance(n, rng)
        a_rows, b_rows = instance_tables(inst)
        r = find_b_optimal_comparison(inst.profile, inst.realization)
        s = r.stats
        if r.matching.pairs != b_best(a_rows, b_rows):
            bad.append(f"instance {k}: wrong matching")
        if s["step2_queries"] != s["good"] + s["bad"] or s["step2_queries"] > s["good"] + max(n - 2, 0) * len(s["rotations"]):
            bad.append(f"instance {k}: decomposition {s['step2_queries']} vs good {s['good']}")
        if n <= 5:
            opt = _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, inst)
            ratio = r.queries / max(opt, 1)
            worst = max(worst, ratio / n)
            if ratio > 3 * n:
                bad.append(f"instance {k}: ratio {ratio:.2f} > 3n")
    check(4, "B-optimal correctness and O(n) envelope", bad, f"max ratio/n {worst:.2f}")


def test_c05_n_minus_one_lower_bounds(check):
    rng = random.Random(105)
    bad = []
    for k in range(150):
        n = rng.randint(1, 4)
        inst = random_instance(n, rng)
        mb = b_optimal_matching(inst)
        for model in (QueryModel.COMPARISON, QueryModel.SET):
            size = _opt(model, CertTarget.STABLE_B_OPTIMAL, inst, mb)
            if size < n - 1:
                bad.append(f"instance {k} {model.value}: {size} < {n - 1}")
    check(5, "n-1 lower bounds", bad)


def test_c06_adversary_forcing(check):
    bad = []
    rows = []
    for n in (8, 12, 16, 20):
        adv = Fig1Adversary(n)
        r = find_b_optimal_comparison(adv.profile, adv)
        inst = adv.instance()  # raises if any answer is contradicted
        cert = fig1_certificate(inst)
        rows.append(f"n={n}: {r.queries} vs {cert.size}")
        if r.queries < n * n / 16:
            bad.append(f"n={n}: {r.queries} < n^2/16")
        if cert.size > 2 * n - 2 or not certifies_b_optimal(cert.knowledge, inst.profile, inst.matching):
            bad.append(f"n={n}: certificate {cert.size}")
        if r.matching != b_optimal_matching(inst):
            bad.append(f"n={n}: wrong matching")
    check(6, "adversary forcing", bad, "; ".join(rows))


def test_c07_two_sided_verification(check):
    rng = random.Random(107)
    bad = []
    for k in range(100):
        n = rng.randint(1, 6)
        inst = random_instance(n, rng)
        m = b_optimal_matching(inst) if k % 2 else stable_matchings(inst)[0]
        r = verify_stable_twosided(m, Oracle(Realization(inst.profile.a_prefs), Side.A), inst.realization)
        if r.verdict != STABLE or r.queries > 2 * (n * n - n):
            bad.append(f"instance {k}: {r.verdict} with {r.queries}")
    inst = fix_2sided()
    r = verify_stable_twosided(inst.matching, Oracle(Realization(inst.profile.a_prefs), Side.A), inst.realization)
    if r.queries != 4:
        bad.append(f"FIX-2SIDED: {r.queries} != 4")
    check(7, "two-sided verification", bad, "FIX-2SIDED 4 vs 2")


def test_c08_set_stable_verification(check):
    rng = random.Random(108)
    bad = []
    for k in range(120):
        inst = random_instance(rng.randint(1, 4), rng)
        a_rows, b_rows = instance_tables(inst)
        for m in stable_matchings(inst):
            got = verify_stable_set(inst.profile, m, inst.realization).queries
            z = sum(1 for j in range(inst.n) if potential_blockers(inst.profile, m, j))
            opt = _opt(QueryModel.SET, CertTarget.STABLE, inst, m)
            if not got == z == opt:
                bad.append(f"instance {k}: alg {got}, z {z}, opt {opt}")
        if inst.n <= 3:
            m = b_optimal_matching(inst)
            if verify_stable_set(inst.profile, m, inst.realization).queries != min_cert(a_rows, b_rows, m.pairs, CertTarget.STABLE, "set"):
                bad.append(f"instance {k}: independent oracle disagrees")
    check(8, "set-query stable verification", bad)


def test_c09_algorithm2_bound(check):
    rng = random.Random(109)
    bad = []
    for k in range(200):
        n = (8, 16, 32, 64)[k % 4]
        inst = random_instance(n, rng)
        mb = b_optimal_matching(inst)
        m = mb if k % 5 else stable_matchings(inst)[0] if n <= 8 else mb
        r = verify_b_optimal_set(inst.profile, m, inst.realization)
        if r.queries > set_query_budget(n):
            bad.append(f"run {k}: {r.queries} > {set_query_budget(n)}")
        sizes = r.stats["r_sizes"]
        for before, after in zip(sizes, sizes[1:]):
            if any(x > 1 and y > (x + 1) // 2 for x, y in zip(before, after)):
                bad.append(f"run {k}: halving broken")
                break
        if (r.verdict == B_OPTIMAL) != (m == mb):
            bad.append(f"run {k}: verdict {r.verdict}")
        if r.verdict == B_OPTIMAL and not certifies_b_optimal(r.knowledge, inst.profile, m):
            bad.append(f"run {k}: unsound certificate")
    check(9, "Algorithm 2 O(n log n) bound", bad)


def test_c10_offline_set_certifier(check):
    rng = random.Random(110)
    bad = []
    for n in range(4, 65):
        inst = random_instance(n, rng)
        mb = b_optimal_matching(inst)
        cert = certify_b_optimal_offline_set(inst, mb)
        if cert.size > 3 * n or not certifies_b_optimal(cert.knowledge, inst.profile, mb):
            bad.append(f"n={n}: size {cert.size}")
    check(10, "offline O(n) set certifier", bad)


def test_c11_fas_reduction(check):
    rng = random.Random(111)
    bad = []
    for k in range(50):
        n = rng.randint(1, 5)
        arcs = tuple((u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3)
        g = DirectedGraph(n, arcs)
        fas = feedback_arc_set(g)
        h = nx.DiGraph(arcs)
        h.remove_edges_from(fas)
        inst = gen_fas_reduction(g)
        want = stability_query_count(inst.profile, inst.matching) + len(fas)
        got = _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, inst, inst.matching)
        if got != want or not nx.is_directed_acyclic_graph(h):
            bad.append(f"graph {k} {arcs}: {got} != {want}")
    cyc = gen_fas_reduction(DirectedGraph(3, ((0, 1), (1, 2), (2, 0))))
    if _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, cyc, cyc.matching) != 4:
        bad.append("3-cycle != 4")
    check(11, "FAS reduction equivalence", bad, "3-cycle gives 3 + 1 = 4")


def test_c12_interview_parity(check):
    rng = random.Random(112)
    bad = []
    for k in range(100):
        n = rng.randint(1, 6)
        inst = random_instance(n, rng)
        a_rows, b_rows = instance_tables(inst)
        ma = Matching(a_best(a_rows, b_rows))
        qb = 0
        for j in range(n):
            z = [i for i in range(n) if inst.profile.a_rank[i][j] < inst.profile.a_rank[i][ma.of_a(i)]]
            qb += 1 + len(z) if z else 0
        ri = find_a_optimal_interview(inst.profile, inst.realization)
        if ri.queries != qb or ri.matching != ma:
            bad.append(f"instance {k}: {ri.queries} != {qb}")
        rb = find_b_optimal_interview(inst.profile, inst.realization)
        rc = find_b_optimal_comparison(inst.profile, inst.realization)
        if rb.queries > min(n * n, 2 * rc.queries) or rb.matching.pairs != b_best(a_rows, b_rows):
            bad.append(f"instance {k}: interviews {rb.queries}, comparisons {rc.queries}")
        if blocking(a_rows, b_rows, rb.matching.pairs):
            bad.append(f"instance {k}: unstable output")
    check(12, "interview parity", bad)
