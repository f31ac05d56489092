#!/usr/bin/env python3
"""Reproduce the benchmark grid of expected delays and LP lower bounds.

Prints the grid in the reference layout (max-delay block, then sum-delay)
with Monte-Carlo standard errors, and optionally writes the long-form CSV.

    python scripts/reproduce_table.py --samples 1000000 --H 100 --seed 7 \
        --out results/table.csv
"""

import argparse
from pathlib import Path

from bugshare.simulate import reproduce_table, table_to_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1_000_000)
    parser.add_argument("--H", type=int, default=100)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", type=Path, default=None, help="CSV destination")
    args = parser.parse_args()

    records = reproduce_table(H=args.H, samples=args.samples, seed=args.seed)
    table = {(r.distribution, r.n, r.mechanism, r.objective): r for r in records}

    rows = [(d, n) for d in ("U(0,1)", "N(0.5,0.2)", "N(0.5,0.4)") for n in (1, 2, 5, 10)]
    for objective in ("max", "sum"):
        print(f"\nexpected {objective}-delay (gcsod / cs / lower bound)")
        print(f"{'prior, agents':>20}  {'gcsod':>16} {'cs':>16} {'bound':>8}")
        for label, n in rows:
            g = table[(label, n, "gcsod", objective)]
            c = table[(label, n, "cs", objective)]
            b = table[(label, n, "lower_bound", objective)]
            print(
                f"{label + f', n={n}':>20}  "
                f"{g.value:7.4f} +-{g.stderr:7.5f} "
                f"{c.value:7.4f} +-{c.stderr:7.5f} {b.value:8.4f}"
            )

    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(table_to_csv(records))
        print(f"\nwrote {len(records)} records to {args.out}")


if __name__ == "__main__":
    main()
