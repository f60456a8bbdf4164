"""Extraction runs, report verification and parameter sweeps.

These functions produce the JSON-ready dictionaries the command line writes.
Reports never carry wall-clock time unless ``timing`` is requested, so reruns
are byte-identical.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any

from .classifier import Classifier
from .errors import DegenerateOrbitError, GenerationError
from .extraction import (
    Cluster,
    OrbitFamily,
    SharpOutput,
    collapse_partitions,
    fuzzy_extract,
    hamming_extract,
    sharpen,
    strong_extract,
    verify_fuzzy,
    verify_hamming,
    verify_theorem2,
)
from .fileformat import rational, spec_digest
from .generate import gen_instance
from .oracle import DEFAULT_BUDGET, DistanceKind, GrayPolicy, OracleSpec, QueryHandle, check_assumptions
from .seeding import derive_seed

ALGORITHMS = ("strong", "hamming", "fuzzy", "sharp", "symmetric")

_ALGO_KINDS = {
    "strong": {DistanceKind.STRONG},
    "hamming": {DistanceKind.HAMMING},
    "fuzzy": {DistanceKind.TRANSPORT, DistanceKind.SYMMETRIC},
    "sharp": {DistanceKind.TRANSPORT, DistanceKind.SYMMETRIC},
    "symmetric": {DistanceKind.SYMMETRIC, DistanceKind.TRANSPORT},
}


class UsageError(ValueError):
    pass


def _bits(cs) -> list[str]:
    return [str(c) for c in cs]


def run_extract(
    spec: OracleSpec,
    algorithm: str,
    *,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
    timing: bool = False,
) -> dict[str, Any]:
    """Run one extraction against a query-only handle and build its report."""
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}")
    if spec.distance_kind not in _ALGO_KINDS[algorithm]:
        raise UsageError(f"algorithm {algorithm} does not apply to {spec.distance_kind.value} oracles")
    handle = QueryHandle.for_spec(spec)
    start = time.perf_counter()
    report: dict[str, Any] = {
        "algorithm": algorithm,
        "spec_digest": spec_digest(spec),
        "n": spec.n,
        "delta": rational(spec.delta),
        "orbits": [],
        "constant_orbits": [],
        "P": [],
        "Q": [],
        "output": None,
        "theorem2": None,
    }
    opts = {"budget": budget, "threads": threads}
    if algorithm == "strong":
        report["output"] = _bits(strong_extract(handle, **opts))
    elif algorithm == "hamming":
        clusters = hamming_extract(handle, int(spec.delta), **opts)
        report["output"] = [
            {"representative": str(c.representative), "members": _bits(sorted(c.members)), "verified": c.verified}
            for c in clusters
        ]
    else:
        fam = fuzzy_extract(handle, spec.delta, **opts)
        report["orbits"] = fam.to_lists()
        if fam.constant_orbits:
            report["constant_orbits"] = [[str(Classifier(spec.n, (1 << spec.n) - 1))], [str(Classifier(spec.n, 0))]]
        if algorithm in ("sharp", "symmetric"):
            out = sharpen(fam)
            report["P"], report["Q"] = _bits(out.P), _bits(out.Q)
            report["theorem2"] = verify_theorem2(spec, out).to_dict()
            if algorithm == "symmetric":
                report["output"] = _bits(collapse_partitions(out))
    elapsed = time.perf_counter() - start
    report["runtime_ms"] = round(elapsed * 1000, 3) if timing else None
    report["query_count"] = handle.query_count
    report["access_log"] = handle.access_log()
    return report


# -- verification of stored reports ------------------------------------------


def _family_from_report(report: dict[str, Any]) -> OrbitFamily:
    lists = report["orbits"]
    if len(lists) % 2:
        raise UsageError("orbit list must hold Orb_1..Orb_m followed by Orb'_1..Orb'_m")
    m = len(lists) // 2
    sets = [frozenset(Classifier.from_string(s) for s in group) for group in lists]
    return OrbitFamily(list(zip(sets[:m], sets[m:])), bool(report.get("constant_orbits")))


def verify_report(spec: OracleSpec, report: dict[str, Any], *, budget: int = DEFAULT_BUDGET) -> dict[str, Any]:
    """Recheck a stored report from its own contents and the spec."""
    if report.get("spec_digest") != spec_digest(spec):
        raise UsageError("report was produced from a different spec (digest mismatch)")
    algo = report["algorithm"]
    checks: dict[str, Any] = {}
    if algo == "strong":
        got = sorted(Classifier.from_string(s) for s in report["output"])
        want = sorted(spec.truth)
        findings = [] if got == want else [f"extracted {_bits(got)}, truth is {_bits(want)}"]
        checks["strong_exact"] = {"passed": not findings, "findings": findings}
    elif algo == "hamming":
        clusters = [
            Cluster(Classifier.from_string(c["representative"]),
                    frozenset(Classifier.from_string(s) for s in c["members"]), c["verified"])
            for c in report["output"]
        ]
        h = verify_hamming(spec, clusters)
        checks["hamming"] = {"passed": h.passed, "findings": h.findings}
    else:
        fam = _family_from_report(report)
        f = verify_fuzzy(spec, fam, budget=budget)
        checks["fuzzy"] = {"passed": f.passed, "label": f.label, "findings": f.findings}
        if algo in ("sharp", "symmetric"):
            P = [Classifier.from_string(s) for s in report["P"]]
            Q = [Classifier.from_string(s) for s in report["Q"]]
            t2 = verify_theorem2(spec, SharpOutput(P, Q, [], fam))
            checks["theorem2"] = {"passed": t2.passed, **t2.to_dict()}
            if algo == "symmetric":
                parts = _bits(collapse_partitions(SharpOutput(P, Q, [], fam)))
                findings = [] if parts == report["output"] else ["partitions do not match P/Q"]
                checks["partitions"] = {"passed": not findings, "findings": findings}
    assumptions = check_assumptions(spec, budget=budget)
    passed = all(c["passed"] for c in checks.values())
    return {
        "spec_digest": report["spec_digest"],
        "algorithm": algo,
        "assumptions": assumptions.to_dict(),
        "checks": checks,
        "label": "pass" if passed else ("assumption-violated" if not assumptions.ok else "failure"),
        "passed": passed,
    }


# -- sweeps ------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    n: tuple[int, ...] = ()
    m: tuple[int, ...] = (1,)
    delta: tuple[Fraction, ...] = ()
    policy: tuple[str, ...] = ("reject-all",)
    distance: str = "transport"
    algorithm: str = "sharp"
    seeds: int = 1
    seed: int = 0
    contexts: int = 1
    relaxed: bool = False
    budget: int = DEFAULT_BUDGET
    timing: bool = False

    def grid(self) -> list[tuple[int, int, Fraction, str]]:
        return list(product(self.n, self.m, self.delta, self.policy))


def _ratio(check: dict) -> float:
    worst = 0.0
    for idx in check.get("per_index", []):
        for err, bound in ((idx["p_error"], idx["p_bound"]), (idx["q_error"], idx["q_bound"])):
            if err is None or bound is None:
                continue
            if err and bound > 0:
                worst = max(worst, err / bound)
    return worst


def run_point(cfg: SweepConfig, n: int, m: int, delta: Fraction, policy: str) -> dict[str, Any]:
    runs = []
    for s in range(cfg.seeds):
        seed = derive_seed(cfg.seed, "sweep", n, m, rational(delta), policy, s)
        gray = GrayPolicy(policy, seed=derive_seed(seed, "gray"))
        record: dict[str, Any] = {"run": s, "seed": seed}
        try:
            spec = gen_instance(n, m, delta, cfg.distance, gray, seed,
                                context_count=cfg.contexts, relaxed=cfg.relaxed)
        except GenerationError as exc:
            record.update(status="generation-failure", constraint=exc.constraint)
            runs.append(record)
            continue
        try:
            report = run_extract(spec, cfg.algorithm, budget=cfg.budget, timing=cfg.timing)
        except DegenerateOrbitError as exc:
            label = "assumption-violated" if not check_assumptions(spec).ok else "failure"
            record.update(status=label, checks={"extraction": False}, error=str(exc))
            runs.append(record)
            continue
        verdict = verify_report(spec, report, budget=cfg.budget)
        record.update(
            status=verdict["label"],
            checks={k: v["passed"] for k, v in verdict["checks"].items()},
            max_error_ratio=_ratio(verdict["checks"].get("theorem2", {})),
            query_count=report["query_count"],
            runtime_ms=report["runtime_ms"],
        )
        runs.append(record)
    return {"n": n, "m": m, "delta": rational(delta), "policy": policy, **aggregate(runs), "runs": runs}


def aggregate(runs: list[dict[str, Any]]) -> dict[str, Any]:
    """Summary counts; recomputable from the per-run records alone."""
    per_check: dict[str, dict[str, int]] = {}
    for r in runs:
        for name, ok in r.get("checks", {}).items():
            slot = per_check.setdefault(name, {"pass": 0, "fail": 0})
            slot["pass" if ok else "fail"] += 1
    ratios = [r["max_error_ratio"] for r in runs if "max_error_ratio" in r]
    times = [r["runtime_ms"] for r in runs if r.get("runtime_ms") is not None]
    count = {s: sum(1 for r in runs if r["status"] == s)
             for s in ("pass", "failure", "assumption-violated", "generation-failure")}
    return {
        "counts": count,
        "checks": dict(sorted(per_check.items())),
        "max_error_ratio": max(ratios) if ratios else None,
        "query_count": sum(r.get("query_count", 0) for r in runs),
        "runtime_ms": round(sum(times), 3) if times else None,
    }


def run_sweep(cfg: SweepConfig, *, threads: int = 1) -> dict[str, Any]:
    points = cfg.grid()
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda p: run_point(cfg, *p), points))
    else:
        results = [run_point(cfg, *p) for p in points]
    return {
        "config": {
            "n": list(cfg.n), "m": list(cfg.m), "delta": [rational(d) for d in cfg.delta],
            "policy": list(cfg.policy), "distance": cfg.distance, "algorithm": cfg.algorithm,
            "seeds": cfg.seeds, "seed": cfg.seed, "contexts": cfg.contexts, "relaxed": cfg.relaxed,
        },
        "points": results,
        "failures": sum(p["counts"]["failure"] for p in results),
    }
