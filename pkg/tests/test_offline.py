import random

import pytest

from naive import instance_tables, min_cert

from matchprobe import CertTarget, KnowledgeState, Matching, b_optimal_matching, stable_matchings
from matchprobe.fixtures import fig1_static, fix_id, fix_rot2, gen_fig1_randomized, random_instance
from matchprobe.graphs import DirectedGraph, FeedbackMode, feedback_arc_set, feedback_vertex_set
from matchprobe.knowledge import OracleSizeError, certifies_b_optimal, certifies_semantic, consistent_with
from matchprobe.model import potential_blockers, stability_query_count
from matchprobe.offline import (
    CertificateProblem,
    NotBOptimalError,
    certify_b_optimal_approx_comparison,
    certify_b_optimal_offline_set,
    fig1_certificate,
    gen_fas_reduction,
    gen_fvs_reduction,
    gen_interview_hardness,
    min_certificate,
)
from matchprobe.oracles import QueryModel
from matchprobe.rotations import candidate_graph, is_acyclic

CYC3 = DirectedGraph(3, ((0, 1), (1, 2), (2, 0)), name="cyc3")


def _opt(model, target, inst, m=None, **kw):
    return min_certificate(CertificateProblem(model, target, inst, m), **kw)


def test_min_certificate_examples():
    assert _opt(QueryModel.COMPARISON, CertTarget.STABLE, fix_id(3), Matching.identity(3)).size == 0
    assert _opt(QueryModel.COMPARISON, CertTarget.STABLE, fix_rot2(), Matching((1, 0))).size == 2
    fas = gen_fas_reduction(CYC3)
    cert = _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, fas, fas.matching)
    assert cert.size == 4
    assert certifies_b_optimal(cert.knowledge, fas.profile, fas.matching)
    assert consistent_with(cert.knowledge, fas.realization)


def test_min_certificate_size_limit():
    with pytest.raises(OracleSizeError):
        _opt(QueryModel.COMPARISON, CertTarget.STABLE, fix_id(7), Matching.identity(7))
    assert _opt(QueryModel.COMPARISON, CertTarget.STABLE, fix_id(7), Matching.identity(7), limit=7).size == 0


def test_size_limit_env_override(monkeypatch):
    monkeypatch.setenv("MATCHPROBE_ORACLE_LIMIT", "2")
    with pytest.raises(OracleSizeError):
        _opt(QueryModel.COMPARISON, CertTarget.STABLE, fix_id(3), Matching.identity(3))


def test_approx_comparison_examples():
    cert = certify_b_optimal_approx_comparison(fix_id(2), Matching.identity(2))
    assert cert.size == 1 == min_cert(*instance_tables(fix_id(2)), (0, 1), CertTarget.STABLE_B_OPTIMAL)
    fas = gen_fas_reduction(CYC3)
    assert certify_b_optimal_approx_comparison(fas, fas.matching).size == 4
    fig = fig1_static(12)
    cert = certify_b_optimal_approx_comparison(fig, Matching.identity(12))
    assert cert.size <= 22
    assert certifies_b_optimal(cert.knowledge, fig.profile, Matching.identity(12))


def test_certifiers_reject_non_b_optimal():
    with pytest.raises(NotBOptimalError):
        certify_b_optimal_approx_comparison(fix_rot2(), Matching((0, 1)))
    with pytest.raises(NotBOptimalError):
        certify_b_optimal_offline_set(fix_rot2(), Matching((0, 1)))


def test_offline_set_examples():
    for inst, m in ((fix_id(2), Matching.identity(2)), (fix_rot2(), Matching((1, 0)))):
        cert = certify_b_optimal_offline_set(inst, m)
        assert cert.size <= 6
        assert certifies_b_optimal(cert.knowledge, inst.profile, m)


def test_reduction_shapes():
    fas = gen_fas_reduction(CYC3)
    assert fas.n == 3 and fas.matching == Matching.identity(3)
    for v in range(3):
        row = fas.profile.a_prefs[v]
        assert row[-2:] == (v, (v + 1) % 3)
    fvs = gen_fvs_reduction(DirectedGraph(2, ((0, 1), (1, 0)), name="cyc2"))
    assert fvs.n == 2
    for v in range(2):
        assert fvs.realization.b_prefs[fvs.matching.of_a(v)][0] == v
        assert fvs.profile.a_rank[v][fvs.matching.of_a(v)] < fvs.profile.a_rank[v][fvs.matching.of_a(1 - v)]
    empty = gen_fas_reduction(DirectedGraph(2, ()))
    q = stability_query_count(empty.profile, empty.matching)
    assert _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, empty, empty.matching).size == q + 0 == 2


def test_reductions_reject_self_loops():
    with pytest.raises(ValueError):
        gen_fas_reduction(DirectedGraph(2, ((0, 0),)))


def test_interview_hardness_dummies():
    inst = gen_interview_hardness(CYC3)
    n = inst.n
    assert n == 4
    z = 3
    for v in range(3):
        assert inst.profile.a_prefs[v][0] == z  # z' first for every real agent
        assert inst.realization.b_prefs[v][-1] == z  # z last for every real b
    assert b_optimal_matching(inst) == inst.matching


def test_fvs_reduction_vertex_queries_rule_out_rotations():
    # top(M(a_v), A) for v in a feedback vertex set leaves no candidate cycle
    rng = random.Random(47)
    for _ in range(15):
        n = rng.randint(2, 4)
        arcs = tuple((u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.4)
        g = DirectedGraph(n, arcs)
        inst = gen_fvs_reduction(g)
        m = inst.matching
        fvs = feedback_vertex_set(g)
        k = KnowledgeState.empty(n)
        for v in fvs:
            j = m.of_a(v)
            k = k.with_top(j, v, [i for i in range(n) if i != v])
        assert is_acyclic(candidate_graph(inst.profile, m, k))
        z = sum(1 for j in range(n) if potential_blockers(inst.profile, m, j))
        size = _opt(QueryModel.SET, CertTarget.STABLE_B_OPTIMAL, inst, m).size
        assert size <= z + len(fvs)


def test_thm_exactness_and_n_minus_one_bounds():
    rng = random.Random(53)
    for _ in range(60):
        n = rng.randint(2, 4)
        inst = random_instance(n, rng)
        for m in stable_matchings(inst):
            assert _opt(QueryModel.COMPARISON, CertTarget.STABLE, inst, m).size == stability_query_count(inst.profile, m)
        mb = b_optimal_matching(inst)
        assert _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, inst, mb).size >= n - 1
        assert _opt(QueryModel.SET, CertTarget.STABLE_B_OPTIMAL, inst, mb).size >= n - 1


def test_pivot_universe_matches_full_universe():
    rng = random.Random(59)
    for _ in range(80):
        inst = random_instance(rng.randint(2, 4), rng)
        mb = b_optimal_matching(inst)
        a = _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, inst, mb)
        b = _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, inst, mb, universe="full")
        assert a.size == b.size


def test_restricted_set_universe_matches_full_set_universe():
    rng = random.Random(61)
    for _ in range(60):
        inst = random_instance(rng.randint(2, 3), rng)
        for target in (CertTarget.STABLE, CertTarget.STABLE_B_OPTIMAL):
            mb = b_optimal_matching(inst)
            a = _opt(QueryModel.SET, target, inst, mb)
            b = _opt(QueryModel.SET, target, inst, mb, universe="full")
            assert a.size == b.size


def test_brute_force_matches_independent_oracle():
    rng = random.Random(67)
    for _ in range(30):
        inst = random_instance(rng.randint(2, 3), rng)
        tables = instance_tables(inst)
        mb = b_optimal_matching(inst)
        for model, name in ((QueryModel.COMPARISON, "comparison"), (QueryModel.SET, "set")):
            got = _opt(model, CertTarget.STABLE_B_OPTIMAL, inst, mb).size
            assert got == min_cert(*tables, mb.pairs, CertTarget.STABLE_B_OPTIMAL, name)


def test_certifiers_sound_and_within_envelope():
    rng = random.Random(71)
    for _ in range(80):
        n = rng.randint(2, 5)
        inst = random_instance(n, rng)
        mb = b_optimal_matching(inst)
        approx = certify_b_optimal_approx_comparison(inst, mb, FeedbackMode.EXACT)
        opt = _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, inst, mb).size
        assert approx.size <= 2 * opt + n + 1
        assert certifies_semantic(approx.knowledge, inst.profile, mb, CertTarget.STABLE_B_OPTIMAL)
        greedy = certify_b_optimal_approx_comparison(inst, mb, FeedbackMode.GREEDY)
        assert certifies_b_optimal(greedy.knowledge, inst.profile, mb)
        s = certify_b_optimal_offline_set(inst, mb)
        assert n - 1 <= s.size <= 3 * n
        assert certifies_semantic(s.knowledge, inst.profile, mb, CertTarget.STABLE_B_OPTIMAL)


def test_fig1_certificates():
    for n in (4, 8, 12, 16):
        inst = fig1_static(n)
        cert = fig1_certificate(inst)
        assert cert.size == 2 * n - 2
        assert certifies_b_optimal(cert.knowledge, inst.profile, Matching.identity(n))
    for seed in range(5):
        inst = gen_fig1_randomized(8, seed)
        assert b_optimal_matching(inst) == Matching.identity(8)
        assert certify_b_optimal_approx_comparison(inst, inst.matching).size <= 14


def test_fas_reduction_small_graph_sweep():
    rng = random.Random(73)
    for _ in range(10):
        n = rng.randint(1, 4)
        arcs = tuple((u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.4)
        g = DirectedGraph(n, arcs)
        inst = gen_fas_reduction(g)
        want = stability_query_count(inst.profile, inst.matching) + len(feedback_arc_set(g))
        assert _opt(QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, inst, inst.matching).size == want
