#!/usr/bin/env python3
"""Where does a certifiable box first appear as the adjustment speed grows?

For each alpha on a lattice, run the seeded random box search at a fixed
budget and record either the best certified margin or, when the search
comes up empty, the margin and identity of the least-violated corner
condition.  The near-miss margins climb monotonically toward zero as
alpha increases, which localizes the feasibility threshold between the
last empty row and the first row with hits; at the default budget that
bracket is (15, 16] with the reference cost parameters.

Writes a CSV (alpha, hits, best_margin, violated, evaluated) and prints
the same table.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import sys

import numpy as np

from triopoly import PAPER_PARAMS, search_boxes


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha-range", default="10,17",
                    help="lo,hi inclusive lattice endpoints")
    ap.add_argument("--samples", type=int, default=8, help="lattice points")
    ap.add_argument("--budget", type=int, default=10**5,
                    help="candidate evaluations per alpha")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="CSV destination (default: stdout only)")
    args = ap.parse_args(argv)

    lo, hi = (float(s) for s in args.alpha_range.split(","))
    alphas = np.linspace(lo, hi, args.samples)

    rows = []
    for alpha in alphas:
        p = dataclasses.replace(PAPER_PARAMS, alpha=float(alpha))
        res = search_boxes(p, "random", args.budget, seed=args.seed)
        if len(res):
            rows.append([alpha, len(res), res.margins[0], "", res.evaluated])
        elif res.near_miss is not None:
            miss = res.near_miss
            rows.append([alpha, 0, miss.margin, miss.violated, res.evaluated])
        else:
            rows.append([alpha, 0, float("nan"), "no candidate", res.evaluated])

    header = ["alpha", "hits", "best_margin", "violated", "evaluated"]
    print(f"{'alpha':>7s} {'hits':>5s} {'best_margin':>24s} {'violated':>9s}")
    for alpha, hits, margin, violated, _ in rows:
        print(f"{alpha:7.3f} {hits:5d} {margin:24.17g} {violated:>9s}")

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([f"{row[0]:.17g}", row[1], f"{row[2]:.17g}",
                            row[3], row[4]])
        print(f"\nwrote {args.out}")

    first_hit = next((r[0] for r in rows if r[1] > 0), None)
    if first_hit is None:
        print("\nno certifiable box found on this lattice at this budget")
    else:
        last_empty = max((r[0] for r in rows if r[1] == 0 and r[0] < first_hit),
                         default=None)
        if last_empty is None:
            print(f"\nhits already present at alpha = {first_hit:g}")
        else:
            print(f"\nfeasibility threshold inside ({last_empty:g}, {first_hit:g}]"
                  f" at budget {args.budget}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
