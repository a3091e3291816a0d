"""Run the pipeline over a range of seeds and tabulate pass counts, retries and time."""

import argparse
import json
import time

from scrollforge.k3pipeline import GenericityError, run_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", default="1-3", help="range like 1-5 or a comma list")
    ap.add_argument("--prime", type=int, default=32003)
    ap.add_argument("--upto", default="quadrics", help="last stage to run")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    if "-" in args.seeds:
        lo, hi = map(int, args.seeds.split("-"))
        seeds = range(lo, hi + 1)
    else:
        seeds = [int(s) for s in args.seeds.split(",")]
    rows = []
    for seed in seeds:
        t = time.perf_counter()
        try:
            _, rep = run_pipeline(seed, args.prime, [args.upto])
            row = {"seed": seed, "passed": sum(c.passed for c in rep.checks), "checks": len(rep.checks),
                   "retries": rep.retries, "failed": [c.name for c in rep.failed()]}
        except GenericityError as exc:
            row = {"seed": seed, "error": str(exc)}
        row["seconds"] = round(time.perf_counter() - t, 1)
        rows.append(row)
        if not args.json:
            status = row.get("error") or f"{row['passed']}/{row['checks']} pass, {row['retries']} retries"
            print(f"seed {seed:>4}  {status}  {row['seconds']} s", flush=True)
    if args.json:
        print(json.dumps(rows, indent=2, ensure_ascii=False))


if __name__ == "__main__":
    main()
