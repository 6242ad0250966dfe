"""``matchprobe`` command line: gen, find, verify, offline, adversary, bench."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import bench
from .fixtures import fix_2sided, fix_eq, fix_id, fix_rot2, fig1_static, gen_fig1_randomized, random_instance
from .graphs import FeedbackError, FeedbackMode, read_edge_list
from .knowledge import CertTarget, OracleSizeError
from .model import (
    HiddenPreferenceError,
    Instance,
    Matching,
    MatchprobeError,
    Realization,
    Side,
    a_optimal_matching,
    b_optimal_matching,
    stability_query_count,
)
from .offline import (
    CertificateProblem,
    NoCertificateError,
    NotBOptimalError,
    certify_b_optimal_approx_comparison,
    certify_b_optimal_offline_set,
    gen_fas_reduction,
    gen_fvs_reduction,
    gen_interview_hardness,
    min_certificate,
    size_limit,
)
from .oracles import Oracle, QueryModel, Transcript
from .solve import (
    find_a_optimal_comparison,
    find_a_optimal_interview,
    find_b_optimal_comparison,
    find_b_optimal_interview,
    find_b_optimal_set,
)
from .verify import (
    verify_b_optimal_set,
    verify_stable_comparison,
    verify_stable_interview,
    verify_stable_set,
    verify_stable_twosided,
)

FAMILIES = ("identity", "random", "equal-a", "rot2", "twosided", "figure1", "figure1-random", "fas", "fvs", "interview-hard")
MODELS = [m.value for m in QueryModel]
TARGETS = ("stable", "a-optimal", "b-optimal", "stable-b-optimal")

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class UsageError(MatchprobeError):
    pass


def _cert_target(target: str) -> CertTarget:
    return {
        "stable": CertTarget.STABLE,
        "a-optimal": CertTarget.STABLE_A_OPTIMAL,
        "b-optimal": CertTarget.STABLE_B_OPTIMAL,
        "stable-b-optimal": CertTarget.STABLE_B_OPTIMAL,
    }[target]


# -- gen -------------------------------------------------------------------------


def generate(family: str, n: int | None, seed: int, graph: str | None) -> Instance:
    def need_n(minimum: int = 1, even: bool = False) -> int:
        if n is None or n < minimum or (even and n % 2):
            parity = " and even" if even else ""
            raise UsageError(f"family {family} needs --n >= {minimum}{parity}")
        return n

    if family in ("fas", "fvs", "interview-hard"):
        if not graph:
            raise UsageError(f"family {family} needs --graph FILE")
        g = read_edge_list(graph)
        return {"fas": gen_fas_reduction, "fvs": gen_fvs_reduction, "interview-hard": gen_interview_hardness}[family](g)
    if family == "identity":
        return fix_id(need_n())
    if family == "random":
        return random_instance(need_n(), seed)
    if family == "equal-a":
        return fix_eq(need_n())
    if family == "rot2":
        return fix_rot2()
    if family == "twosided":
        return fix_2sided()
    if family == "figure1":
        return fig1_static(need_n(4, even=True))
    if family == "figure1-random":
        return gen_fig1_randomized(need_n(4, even=True), seed)
    raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


# -- commands -----------------------------------------------------------------------


def _load(args) -> Instance:
    if not args.instance:
        raise UsageError("--instance FILE is required")
    return Instance.load(args.instance)


def _matching(inst: Instance, args) -> Matching:
    choice = getattr(args, "matching", "given")
    if choice == "a-optimal":
        return a_optimal_matching(inst)
    if choice == "b-optimal":
        return b_optimal_matching(inst)
    if inst.matching is None:
        raise UsageError("instance has no designated matching; pass --matching a-optimal|b-optimal")
    return inst.matching


def _opt(inst: Instance, model: QueryModel, target: CertTarget, m: Matching | None, fallback: int) -> tuple[int | None, str]:
    if inst.n > size_limit(model):
        return fallback, "lower-bound"
    try:
        return min_certificate(CertificateProblem(model, target, inst, m)).size, "exact"
    except NoCertificateError:
        return None, "none"


def cmd_find(args) -> dict:
    model = QueryModel(args.model)
    if args.adaptive:
        if args.target not in ("b-optimal", "stable-b-optimal") or model is QueryModel.SET:
            raise UsageError("--adaptive runs the figure1 adversary against B-optimal finding (comparison or interview)")
        if not args.n or args.n < 4 or args.n % 2:
            raise UsageError("--adaptive needs an even --n >= 4")
        return bench.adversary_run(args.n, model)
    inst = _load(args)
    truth = inst.require_realization()
    target = args.target
    t0 = time.perf_counter()
    if target in ("stable", "a-optimal"):
        finder = {QueryModel.COMPARISON: find_a_optimal_comparison, QueryModel.INTERVIEW: find_a_optimal_interview}.get(model)
        if finder is None:
            raise UsageError(f"find --target {target} is not implemented for the {model.value} model")
    else:
        finder = {
            QueryModel.COMPARISON: find_b_optimal_comparison,
            QueryModel.INTERVIEW: find_b_optimal_interview,
            QueryModel.SET: find_b_optimal_set,
        }[model]
    res = finder(inst.profile, truth)
    ms = (time.perf_counter() - t0) * 1000
    cert_target = _cert_target(target)
    if cert_target is CertTarget.STABLE_B_OPTIMAL:
        lb = bench.b_optimal_lower_bound(inst, len(res.stats.get("rotations", ())))
        if model is QueryModel.SET:
            lb = inst.n - 1
    else:
        lb = stability_query_count(inst.profile, a_optimal_matching(inst))
    opt, kind = _opt(inst, model, cert_target, None, lb)
    return bench.report(inst.label, model.value, f"find-{target}", res.queries, opt, lb, kind, "Found", ms,
                        witness=[list(e) for e in res.matching.edges()])


def cmd_verify(args) -> dict:
    model = QueryModel(args.model)
    inst = _load(args)
    truth = inst.require_realization()
    m = _matching(inst, args)
    t0 = time.perf_counter()
    if args.two_sided:
        if model is not QueryModel.COMPARISON or args.target != "stable":
            raise UsageError("--two-sided supports --model comparison --target stable only")
        res = verify_stable_twosided(m, Oracle(Realization(inst.profile.a_prefs), Side.A), truth)
        ms = (time.perf_counter() - t0) * 1000
        lb = inst.n * inst.n - inst.n
        alg = res.queries
        return bench.report(inst.label, model.value, "verify-stable-two-sided", alg, lb, lb, "lower-bound",
                            res.verdict, ms, witness=res.to_dict()["witness"])
    if args.target == "stable":
        fn = {
            QueryModel.COMPARISON: verify_stable_comparison,
            QueryModel.INTERVIEW: verify_stable_interview,
            QueryModel.SET: verify_stable_set,
        }[model]
        res = fn(inst.profile, m, truth)
        lb = stability_query_count(inst.profile, m) if model is not QueryModel.SET else res.queries
    elif args.target in ("b-optimal", "stable-b-optimal"):
        if model is not QueryModel.SET:
            raise UsageError("online B-optimality verification is implemented for the set model only")
        res = verify_b_optimal_set(inst.profile, m, truth)
        lb = inst.n - 1
    else:
        raise UsageError("verify --target a-optimal is not implemented")
    ms = (time.perf_counter() - t0) * 1000
    opt, kind = (None, "none")
    if res.positive:
        opt, kind = _opt(inst, model, _cert_target(args.target), m, lb)
    return bench.report(inst.label, model.value, f"verify-{args.target}", res.queries, opt, lb, kind, res.verdict,
                        ms, witness=res.to_dict()["witness"])


def cmd_offline(args) -> dict:
    model = QueryModel(args.model)
    inst = _load(args)
    inst.require_realization()
    target = _cert_target(args.target)
    m = inst.matching if inst.matching is not None and args.matching == "given" else None
    if args.matching in ("a-optimal", "b-optimal"):
        m = _matching(inst, args)
    t0 = time.perf_counter()
    alg = None
    extra: dict = {}
    if target is CertTarget.STABLE_B_OPTIMAL:
        mb = m or b_optimal_matching(inst)
        if model is QueryModel.COMPARISON:
            mode = FeedbackMode.GREEDY if args.greedy else FeedbackMode.EXACT
            cert = certify_b_optimal_approx_comparison(inst, mb, mode)
            extra["fas_mode"] = mode.value
        elif model is QueryModel.SET:
            cert = certify_b_optimal_offline_set(inst, mb)
        else:
            cert = None
        alg = cert.size if cert is not None else None
        lb = max(inst.n - 1, stability_query_count(inst.profile, mb)) if model is QueryModel.COMPARISON else inst.n - 1
    else:
        lb = stability_query_count(inst.profile, m or a_optimal_matching(inst))
    if inst.n <= size_limit(model):
        cert = min_certificate(CertificateProblem(model, target, inst, m))
        opt, kind = cert.size, "exact"
        log = Transcript()
        for q, ans in zip(cert.queries, cert.answers):
            log.record(q, ans)
        extra["certificate"] = [json.loads(line) for line in log.to_jsonl().splitlines()]
    else:
        opt, kind = None, "lower-bound"
    ms = (time.perf_counter() - t0) * 1000
    return bench.report(inst.label, model.value, f"offline-{args.target}", alg, opt, lb, kind, "Certified", ms, **extra)


def cmd_adversary(args) -> dict:
    if not args.n or args.n < 4 or args.n % 2:
        raise UsageError("adversary needs an even --n >= 4")
    model = QueryModel(args.model)
    if model is QueryModel.SET:
        raise UsageError("adversary runs B-optimal finding with comparison or interview queries")
    return bench.adversary_run(args.n, model)


def cmd_bench(args) -> list[dict]:
    rows = bench.run_suite(args.suite, args.seed)
    if args.out:
        bench.write_outputs(rows, args.out)
    return rows


# -- entry point ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matchprobe", description="Stable matching with queried B-side preferences.")
    p.add_argument("--oracle-limit", type=int, help="cap on n for brute-force optima (overrides MATCHPROBE_ORACLE_LIMIT)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write an instance file")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--graph", help="edge list for fas, fvs and interview-hard")
    g.add_argument("--out", help="output path (stdout if omitted)")

    def common(sp, targets=TARGETS, default_target="stable"):
        sp.add_argument("--instance")
        sp.add_argument("--model", choices=MODELS, default="comparison")
        sp.add_argument("--target", choices=targets, default=default_target)
        sp.add_argument("--matching", choices=("given", "a-optimal", "b-optimal"), default="given")
        sp.add_argument("--out")

    f = sub.add_parser("find", help="run a finding algorithm")
    common(f, default_target="b-optimal")
    f.add_argument("--adaptive", action="store_true", help="play against the figure1 adversary")
    f.add_argument("--n", type=int)

    v = sub.add_parser("verify", help="verify the designated matching")
    common(v)
    v.add_argument("--two-sided", action="store_true")

    o = sub.add_parser("offline", help="offline certificates and brute-force optima")
    common(o, default_target="stable-b-optimal")
    mode = o.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact feedback arc set (default)")
    mode.add_argument("--greedy", action="store_true", help="greedy feedback arc set")

    a = sub.add_parser("adversary", help="Algorithm 1 against the adaptive adversary")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--model", choices=("comparison", "interview"), default="comparison")
    a.add_argument("--out")

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("--suite", required=True, choices=bench.SUITES)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    for sp in (g, f, v, o, a, b):
        sp.add_argument("--oracle-limit", type=int, default=argparse.SUPPRESS)
    return p


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.oracle_limit is not None:
        os.environ["MATCHPROBE_ORACLE_LIMIT"] = str(args.oracle_limit)
    try:
        if args.command == "gen":
            inst = generate(args.family, args.n, args.seed, args.graph)
            if args.out:
                inst.save(args.out)
            else:
                print(json.dumps(inst.to_dict(), indent=1))
            return EXIT_OK
        if args.command == "bench":
            rows = cmd_bench(args)
            for s in bench.summarize(rows):
                print(f"n={s['n']:>3}  rows={s['rows']:>4}  mean_ratio={s['mean_ratio']:.3f}  max_ratio={s['max_ratio']:.3f}")
            if not args.out:
                print(json.dumps(rows, indent=1))
            return EXIT_OK
        handler = {"find": cmd_find, "verify": cmd_verify, "offline": cmd_offline, "adversary": cmd_adversary}[args.command]
        rec = handler(args)
    except (UsageError, HiddenPreferenceError, OracleSizeError, NotBOptimalError, NoCertificateError,
            FeedbackError, ValueError, OSError) as exc:
        print(f"matchprobe: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(rec, args.out)
    return EXIT_NEGATIVE if rec["verdict"] in bench.NEGATIVE else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
