"""Command-line front end.

    needshare allocate --input problem.json --rule serial
    needshare sweep --input problem.json --grid 0,0.5,1
    needshare audit --rule geometric --lambda 0.5 --axioms geometric-characterization --domain Z --trials 10000 --seed 1
    needshare gen --domain Zstar --agents 2..6 --magnitude 10 --count 100 --seed 7 --out problems.jsonl
    needshare infer-lambda --rule serial

Exit codes are part of the interface; see the ``EXIT_*`` constants.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .axioms import audit, generate_problems, parse_axioms, MAX_AGENTS
from .core import DEFAULT_TOL, Domain, DomainError, ProblemError, validate
from .formats import FormatError, allocation_to_dict, read_problem, round_payoff, write_problems
from .rules import RuleSpec, geometric, infer_lambda

EXIT_OK = 0
EXIT_AUDIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_PARSE = 4
EXIT_DOMAIN = 5
EXIT_INVALID_PROBLEM = 6

DOMAIN_NAMES = {"z": Domain.Z, "zstar": Domain.ZSTAR, "zzero": Domain.ZZERO}
RULE_NAMES = ("geometric", "serial", "full-transfer", "no-transfer", "balanced")


class UsageError(Exception):
    pass


def _domain(text: str) -> Domain:
    try:
        return DOMAIN_NAMES[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"domain must be one of Z, Zstar, Zzero; got {text!r}") from None


def _agent_range(text: str) -> Tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        bounds = (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN..MAX, got {text!r}") from None
    if not 1 <= bounds[0] <= bounds[1] <= MAX_AGENTS:
        raise argparse.ArgumentTypeError(f"agent range must lie within 1..{MAX_AGENTS}, got {text!r}")
    return bounds


def _grid(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be a comma list of numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("grid is empty")
    bad = [v for v in values if not 0.0 <= v <= 1.0]
    if bad:
        raise argparse.ArgumentTypeError(f"grid values must lie in [0, 1], got {bad}")
    return values


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _rule(args) -> RuleSpec:
    try:
        return RuleSpec.parse(args.rule, args.lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_allocate(args) -> int:
    rule = _rule(args)
    problem = read_problem(args.input)
    tag = validate(problem)
    x = rule(problem)
    doc = {"rule": str(rule), "domain": tag.value, **allocation_to_dict(x, rounded=True),
           "total": round_payoff(x.total)}
    _emit(json.dumps(doc, indent=2), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    problem = read_problem(args.input)
    tag = validate(problem)
    rows = []
    for lam in args.grid:
        x = geometric(problem, lam)
        rows.append({"lambda": lam, "payoffs": [round_payoff(v) for v in x.payoffs],
                     "total": round_payoff(x.total)})
    doc = {"agents": list(problem.agents), "domain": tag.value,
           "total_revenue": round_payoff(problem.total_revenue), "rows": rows}
    _emit(json.dumps(doc, indent=2), args.output)
    return EXIT_OK


def cmd_audit(args) -> int:
    rule = _rule(args)
    try:
        axioms = parse_axioms(args.axioms)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = audit(rule, axioms, domain=args.domain, trials=args.trials, seed=args.seed, tol=args.tol,
                   n_range=args.agents, magnitude=args.magnitude, rule_name=str(rule))
    _emit(report.to_json(), args.output)
    for r in report.results:
        print(f"{r.axiom}: {r.verdict} (skipped {r.skipped})", file=sys.stderr)
    print(f"seed: {args.seed}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_AUDIT_FAILED


def cmd_gen(args) -> int:
    problems = list(generate_problems(args.domain, args.agents, args.magnitude, args.count, args.seed))
    write_problems(args.out, problems)
    print(f"wrote {len(problems)} {args.domain.value} problems to {args.out} (seed {args.seed})")
    return EXIT_OK


def cmd_infer_lambda(args) -> int:
    print(repr(infer_lambda(_rule(args))))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="needshare", description="Revenue sharing in linear hierarchies with needs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def rule_flags(p, required=True):
        p.add_argument("--rule", required=required,
                       help=f"one of {', '.join(RULE_NAMES)} (or geometric:LAMBDA, "
                            "extended(serial-zero-needs), ...)")
        p.add_argument("--lambda", dest="lam", type=float, help="share kept by each agent (geometric)")

    p = sub.add_parser("allocate", help="apply a rule to one problem file")
    p.add_argument("--input", required=True)
    rule_flags(p)
    p.add_argument("--output")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("sweep", help="geometric allocations over a grid of lambdas")
    p.add_argument("--input", required=True)
    p.add_argument("--grid", required=True, type=_grid)
    p.add_argument("--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("audit", help="search for axiom violations on random problems")
    rule_flags(p)
    p.add_argument("--axioms", required=True, help="'all', suite names or a comma list of axioms")
    p.add_argument("--domain", required=True, type=_domain)
    p.add_argument("--trials", required=True, type=_positive_int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--agents", type=_agent_range, default=(1, 8), help="MIN..MAX (default 1..8)")
    p.add_argument("--magnitude", type=float, default=10.0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("gen", help="write a stream of random problems, one JSON object per line")
    p.add_argument("--domain", required=True, type=_domain)
    p.add_argument("--agents", required=True, type=_agent_range)
    p.add_argument("--magnitude", required=True, type=float)
    p.add_argument("--count", required=True, type=_positive_int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("infer-lambda", help="recover lambda from a rule's two-agent probe payoff")
    rule_flags(p)
    p.set_defaults(func=cmd_infer_lambda)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except FormatError as exc:
        print(f"error: cannot parse problem: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ProblemError as exc:
        print(f"error: malformed problem: {exc}", file=sys.stderr)
        return EXIT_INVALID_PROBLEM
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
