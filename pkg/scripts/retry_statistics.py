"""How often the random choices of the first stages need resampling.

Collects the reasons recorded by the retry counter over many seeds of the
secant sampling and octic stages.
"""

import argparse
import collections
import random

from scrollforge.k3pipeline import (
    GenericityError, RetryCounter, ScrollConfig, build_cubic_scroll, sample_secant_data,
)


class LoggingCounter(RetryCounter):
    def __init__(self):
        super().__init__(10 ** 9)
        self.reasons = collections.Counter()

    def bump(self, reason=""):
        self.reasons[reason or "unspecified"] += 1
        super().bump(reason)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--prime", type=int, default=32003)
    args = ap.parse_args()
    scroll = build_cubic_scroll(args.prime)
    totals = []
    counter = LoggingCounter()
    for s in range(args.samples):
        before = counter.count
        rng = random.Random(f"retry-stats:{s}")
        try:
            sample_secant_data(scroll, rng, counter)
        except GenericityError as exc:
            counter.reasons[str(exc)] += 1
        totals.append(counter.count - before)
    cfg = ScrollConfig(prime=args.prime)
    print(f"prime {cfg.prime}: {args.samples} secant samples")
    print(f"resamples per run: mean {sum(totals) / len(totals):.2f}, max {max(totals)}")
    for reason, n in counter.reasons.most_common():
        print(f"  {n:>5}  {reason}")


if __name__ == "__main__":
    main()
