"""Run the two degenerate fixtures and print their reports."""

import argparse
import sys

from scrollforge.k3pipeline import fixture_degenerate_rulings, fixture_two_rational


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prime", type=int, default=32003)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--only", choices=("degenerate", "two-rational"))
    args = ap.parse_args()
    ok = True
    runs = {"degenerate": fixture_degenerate_rulings, "two-rational": fixture_two_rational}
    for name, fn in runs.items():
        if args.only and name != args.only:
            continue
        _, rep = fn(args.prime, 20, args.seed)
        print(rep.to_text())
        ok &= rep.all_passed
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
