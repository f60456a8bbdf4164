"""Command line front end: ``gen``, ``extract``, ``verify`` and ``sweep``.

Exit codes: 0 success, 1 verification failure, 2 usage or spec error,
3 resource error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import DegenerateOrbitError, GenerationError, ResourceError, SpecError
from .fileformat import dump_spec, dumps, load_spec, parse_rational, read_json, write_atomic
from .generate import gen_instance
from .oracle import DEFAULT_BUDGET, DistanceKind, GrayKind, GrayPolicy, check_assumptions
from .runner import ALGORITHMS, SweepConfig, UsageError, run_extract, run_sweep, verify_report
from .seeding import derive_seed

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _list(kind):
    def parse(text: str):
        return tuple(kind(x) for x in text.split(",") if x.strip())
    return parse


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    policy = GrayPolicy(args.policy, args.accept_probability, derive_seed(args.seed, "gray"))
    spec = gen_instance(
        args.n, args.m, args.delta, args.distance, policy, args.seed,
        context_count=args.contexts, relaxed=args.relaxed,
    )
    _emit(dump_spec(spec), args.out)
    report = check_assumptions(spec, budget=args.budget)
    print(json.dumps(report.to_dict()), file=sys.stderr)
    return EXIT_OK


def _read_spec(path: str):
    with open(path, encoding="ascii") as fh:
        return load_spec(fh.read())


def cmd_extract(args) -> int:
    spec = _read_spec(args.spec)
    report = run_extract(spec, args.algo, threads=args.threads, budget=args.budget, timing=args.timing)
    _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _read_spec(args.spec)
    verdict = verify_report(spec, read_json(args.report), budget=args.budget)
    _emit(dumps(verdict), args.out)
    if not verdict["passed"]:
        for name, check in verdict["checks"].items():
            for finding in check.get("findings", []):
                print(f"{name}: {finding}", file=sys.stderr)
    return EXIT_OK if verdict["passed"] else EXIT_FAIL


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        n=args.n, m=args.m, delta=args.delta, policy=args.policy, distance=args.distance,
        algorithm=args.algo, seeds=args.seeds, seed=args.seed, contexts=args.contexts,
        relaxed=args.relaxed, budget=args.budget, timing=args.timing,
    )
    summary = run_sweep(cfg, threads=args.threads)
    _emit(dumps(summary), args.out)
    return EXIT_FAIL if summary["failures"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairextract", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="maximum number of classifiers to enumerate")

    kinds = [k.value for k in DistanceKind]
    policies = [k.value for k in GrayKind]

    g = sub.add_parser("gen", help="generate an oracle spec")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--delta", type=parse_rational, required=True, help='rational, e.g. "1/200"')
    g.add_argument("--distance", choices=kinds, default="transport")
    g.add_argument("--policy", choices=policies, default="reject-all")
    g.add_argument("--accept-probability", type=parse_rational, default=Fraction(1, 2))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--contexts", type=int, default=1)
    g.add_argument("--relaxed", action="store_true", help="separation-only truth sets, no recovery guarantee")
    common(g)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("extract", help="run an extraction algorithm against a spec's oracle")
    e.add_argument("--spec", required=True)
    e.add_argument("--algo", choices=ALGORITHMS, required=True)
    e.add_argument("--threads", type=int, default=1)
    e.add_argument("--timing", action="store_true", help="record runtime_ms (breaks byte-identical reruns)")
    common(e)
    e.set_defaults(func=cmd_extract)

    v = sub.add_parser("verify", help="verify a report against its spec")
    v.add_argument("--spec", required=True)
    v.add_argument("--report", required=True)
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="gen, extract and verify over a parameter grid")
    s.add_argument("--n", type=_list(int), default=())
    s.add_argument("--m", type=_list(int), default=(1,))
    s.add_argument("--delta", type=_list(parse_rational), default=())
    s.add_argument("--policy", type=_list(str), default=("reject-all",))
    s.add_argument("--distance", choices=kinds, default="transport")
    s.add_argument("--algo", choices=ALGORITHMS, default="sharp")
    s.add_argument("--seeds", type=int, default=1, help="runs per grid point")
    s.add_argument("--seed", type=int, default=0, help="root seed")
    s.add_argument("--contexts", type=int, default=1)
    s.add_argument("--relaxed", action="store_true")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--timing", action="store_true")
    common(s)
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "policy", None) and isinstance(args.policy, tuple):
        bad = [p for p in args.policy if p not in {k.value for k in GrayKind}]
        if bad:
            print(f"error: unknown gray policy {bad[0]!r}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DegenerateOrbitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (SpecError, UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
