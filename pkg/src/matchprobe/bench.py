"""Report records and the benchmark suites behind ``matchprobe bench``."""
from __future__ import annotations

import csv
import json
import math
import random
import statistics
import time
from collections import defaultdict
from pathlib import Path
from typing import Callable

from .adversary import Fig1Adversary
from .fixtures import random_instance
from .knowledge import CertTarget, OracleSizeError
from .model import Instance, Matching, b_optimal_matching, potential_blockers, stability_query_count, stable_matchings
from .offline import CertificateProblem, certify_b_optimal_offline_set, fig1_certificate, min_certificate, size_limit
from .oracles import QueryModel
from .solve import find_b_optimal_comparison, find_b_optimal_interview
from .verify import set_query_budget, verify_b_optimal_set, verify_stable_comparison

CSV_COLUMNS = ["n", "family", "model", "task", "alg_queries", "opt_queries", "bound_kind", "ratio"]
SUITES = ("verification-exactness", "b-optimal-ratio", "adversary-scaling", "set-query-log")
NEGATIVE = ("BlockingPair", "NotStable", "RotationExposed")


def ratio(alg: int, opt: int | None, verdict: str | None = None) -> float | None:
    """alg / max(opt, 1); 1.0 when both are zero; None for negative verdicts or unknown opt."""
    if opt is None or verdict in NEGATIVE:
        return None
    if alg == 0 and opt == 0:
        return 1.0
    return alg / max(opt, 1)


def report(
    instance: str,
    model: str,
    task: str,
    alg_queries: int | None,
    opt_queries: int | None,
    lower_bound: int | None,
    bound_kind: str,
    verdict: str,
    runtime_ms: float,
    **extra,
) -> dict:
    rec = {
        "instance": instance,
        "model": model,
        "task": task,
        "alg_queries": alg_queries,
        "opt_queries": opt_queries,
        "lower_bound": lower_bound,
        "ratio": ratio(alg_queries, opt_queries, verdict) if alg_queries is not None else None,
        "verdict": verdict,
        "runtime_ms": round(runtime_ms, 3),
        "bound_kind": bound_kind,
    }
    rec.update(extra)
    return rec


def b_optimal_lower_bound(instance: Instance, rotations_applied: int = 0) -> int:
    """max(n - 1, stability pairs of the B-optimal matching, 2 * rotations applied)."""
    m = b_optimal_matching(instance)
    return max(instance.n - 1, stability_query_count(instance.profile, m), 2 * rotations_applied)


def opt_or_bound(
    instance: Instance, model: QueryModel, target: CertTarget, m: Matching | None, fallback: int
) -> tuple[int, str]:
    """Brute-force optimum when the instance is small enough, else ``fallback`` as a lower bound."""
    if instance.n <= size_limit(model):
        try:
            return min_certificate(CertificateProblem(model, target, instance, m)).size, "exact"
        except OracleSizeError:
            pass
    return fallback, "lower-bound"


def _timed(fn: Callable):
    t = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t) * 1000


# -- suites --------------------------------------------------------------------


def suite_verification_exactness(seed: int, count: int = 200) -> list[dict]:
    rng = random.Random(seed)
    rows = []
    for k in range(count):
        n = rng.randint(2, 5)
        inst = random_instance(n, rng.randrange(2**31), f"random-n{n}-{k}")
        for idx, m in enumerate(stable_matchings(inst)):
            res, ms = _timed(lambda: verify_stable_comparison(inst.profile, m, inst.realization))
            opt = min_certificate(CertificateProblem(QueryModel.COMPARISON, CertTarget.STABLE, inst, m)).size
            rows.append(
                report(f"{inst.label}-m{idx}", "comparison", "verify-stable", res.queries, opt,
                       stability_query_count(inst.profile, m), "exact", res.verdict, ms, n=n, family="random")
            )
    return rows


def suite_b_optimal_ratio(seed: int, per_n: int = 10, sizes=range(2, 9)) -> list[dict]:
    rng = random.Random(seed)
    rows = []
    for n in sizes:
        for k in range(per_n):
            inst = random_instance(n, rng.randrange(2**31), f"random-n{n}-{k}")
            res, ms = _timed(lambda: find_b_optimal_comparison(inst.profile, inst.realization))
            lb = b_optimal_lower_bound(inst, len(res.stats["rotations"]))
            opt, kind = opt_or_bound(inst, QueryModel.COMPARISON, CertTarget.STABLE_B_OPTIMAL, None, lb)
            rows.append(
                report(inst.label, "comparison", "find-b-optimal", res.queries, opt, lb, kind, "Found", ms,
                       n=n, family="random")
            )
    return rows


def adversary_run(n: int, model: QueryModel = QueryModel.COMPARISON) -> dict:
    adv = Fig1Adversary(n)
    finder = find_b_optimal_interview if model is QueryModel.INTERVIEW else find_b_optimal_comparison
    res, ms = _timed(lambda: finder(adv.profile, adv))
    inst = adv.instance()
    cert = fig1_certificate(inst)
    verdict = "Found" if res.matching == inst.matching else "Wrong"
    return report(
        inst.label, model.value, "find-b-optimal", res.queries, cert.size, n - 1, "certificate", verdict, ms,
        n=n, family="figure1", forced_floor=n * n / 16,
    )


def suite_adversary_scaling(seed: int, sizes=(8, 12, 16, 20)) -> list[dict]:
    return [adversary_run(n) for n in sizes]


def suite_set_query_log(seed: int, per_n: int = 50, sizes=(8, 16, 32, 64)) -> list[dict]:
    rng = random.Random(seed)
    rows = []
    for n in sizes:
        for k in range(per_n):
            inst = random_instance(n, rng.randrange(2**31), f"random-n{n}-{k}")
            m = b_optimal_matching(inst)
            res, ms = _timed(lambda: verify_b_optimal_set(inst.profile, m, inst.realization))
            cert = certify_b_optimal_offline_set(inst, m)
            rows.append(
                report(inst.label, "set", "verify-b-optimal", res.queries, cert.size, n - 1, "certificate",
                       res.verdict, ms, n=n, family="random", budget=set_query_budget(n),
                       iterations=res.stats["iterations"],
                       z_nonempty=sum(1 for j in range(n) if potential_blockers(inst.profile, m, j)))
            )
    return rows


def run_suite(name: str, seed: int = 0) -> list[dict]:
    suites = {
        "verification-exactness": suite_verification_exactness,
        "b-optimal-ratio": suite_b_optimal_ratio,
        "adversary-scaling": suite_adversary_scaling,
        "set-query-log": suite_set_query_log,
    }
    if name not in suites:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rows = suites[name](seed)
    rows.sort(key=lambda r: (r.get("family", ""), r.get("n", 0)))
    return rows


def summarize(rows: list[dict]) -> list[dict]:
    """Mean and max ratio per n."""
    by_n: dict[int, list[float]] = defaultdict(list)
    for r in rows:
        if r["ratio"] is not None:
            by_n[r["n"]].append(r["ratio"])
    return [
        {"n": n, "rows": len(v), "mean_ratio": statistics.fmean(v), "max_ratio": max(v)}
        for n, v in sorted(by_n.items())
    ]


def write_outputs(rows: list[dict], out: str | Path) -> tuple[Path, Path]:
    out = Path(out)
    out.write_text(json.dumps(rows, indent=1) + "\n")
    csv_path = out.with_suffix(".csv")
    with csv_path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in CSV_COLUMNS})
    return out, csv_path


def log2_ceil(n: int) -> int:
    return math.ceil(math.log2(n))
