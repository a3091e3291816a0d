"""Command line entry point: ``scrollforge construct`` and ``scrollforge census``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from sympy import isprime

from . import hklattice as hk
from .idealkit import BudgetError
from .k3pipeline import STAGES, GenericityError, resolve_stages, run_pipeline

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_GENERICITY = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 1
    prime: int = 32003
    stages: list = field(default_factory=lambda: [s for s in STAGES if s != "fixtures"])
    output: str = "text"
    cache_dir: str | None = None
    retry_budget: int = 20

    def __post_init__(self):
        if self.seed < 0:
            raise UsageError("seed must be non-negative")
        if self.prime < 3 or not isprime(self.prime) or self.prime >= 2 ** 31:
            raise UsageError(f"--prime {self.prime}: need an odd prime below 2**31")
        if self.output not in ("json", "text"):
            raise UsageError("output is json or text")
        if self.retry_budget < 0:
            raise UsageError("retry budget must be non-negative")
        try:
            self.stages = resolve_stages(self.stages)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def exit_code_for(report) -> int:
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def cmd_construct(cfg: RunConfig, out=None, timings: bool = True) -> int:
    out = out or sys.stdout
    try:
        _, report = run_pipeline(cfg.seed, cfg.prime, cfg.stages, cfg.retry_budget, cfg.cache_dir)
    except GenericityError as exc:
        print(f"genericity failure: {exc}", file=sys.stderr)
        return EXIT_GENERICITY
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if cfg.output == "json":
        out.write(report.to_json(timings) + "\n")
    else:
        out.write(report.to_text() + "\n")
    return exit_code_for(report)


def census_text(data: dict) -> str:
    lines = ["discriminants", f"  {'d':>4}  {'divisorial':<10}  {'k3_associated':<13}"]
    for r in data["discriminants"]:
        lines.append(f"  {r['d']:>4}  {str(r['divisorial']):<10}  {str(r['k3_associated']):<13}")
    lines.append("")
    lines.append("degree-9 curve classes")
    rows = data["degree9_classes"]
    w = max(len(r["class"]) for r in rows)
    lines.append(f"  {'class':<{w}}  {'q':>6}  {'R^2':>5}  accepted")
    for r in rows:
        lines.append(f"  {r['class']:<{w}}  {r['q']:>6}  {r['R2']:>5}  {r['accepted']}")
    lines.append("")
    inv = data["involution"]
    lines.append(f"involution on divisors  {inv['divisors']}")
    lines.append(f"involution on curves    {inv['curves']}")
    dp = data["double_points"]
    lines.append(f"double points D(R)      {dp['D']}  from {dp['input']}")
    lines.append(f"lattice discriminant    {data['lattice_discriminant']}")
    lines.append("")
    lines.append("notes")
    lines.extend(f"  - {n}" for n in data["notes"])
    return "\n".join(line.rstrip() for line in lines)


def cmd_census(d_min: int = 7, d_max: int = 100, output: str = "text", out=None) -> int:
    out = out or sys.stdout
    data = hk.census(d_min, d_max)
    if output == "json":
        out.write(json.dumps(data, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(census_text(data) + "\n")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scrollforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("construct", help="run pipeline stages and print the verification report")
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--prime", type=int, default=32003)
    c.add_argument("--stages", default=None,
                   help=f"comma-separated subset of {','.join(STAGES)}; prerequisites are added")
    c.add_argument("--output", choices=("json", "text"), default="text")
    c.add_argument("--cache-dir", default=None)
    c.add_argument("--retry-budget", type=int, default=20)
    c.add_argument("--no-timings", action="store_true", help="omit timings from JSON output")
    s = sub.add_parser("census", help="lattice numerology table")
    s.add_argument("--min", type=int, default=7, dest="d_min")
    s.add_argument("--max", type=int, default=100, dest="d_max")
    s.add_argument("--output", choices=("json", "text"), default="text")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "census":
        if args.d_min < 1 or args.d_max < args.d_min:
            print("census range must satisfy 1 <= min <= max", file=sys.stderr)
            return EXIT_USAGE
        return cmd_census(args.d_min, args.d_max, args.output)
    stages = [s.strip() for s in args.stages.split(",") if s.strip()] if args.stages else None
    try:
        cfg = RunConfig(args.seed, args.prime, stages or RunConfig().stages, args.output,
                        os.environ.get("SCROLLFORGE_CACHE") or args.cache_dir, args.retry_budget)
    except UsageError as exc:
        print(f"scrollforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return cmd_construct(cfg, timings=not args.no_timings)


if __name__ == "__main__":
    sys.exit(main())
