#!/usr/bin/env python3
"""Sweep the segment count H and report how much each LP bound moves.

The discretized relaxation tightens monotonically with H, so the drift
between successive resolutions measures how far from converged a given H is.

    python scripts/h_sensitivity.py --H 50 100 200
"""

import argparse

from bugshare.distributions import DistributionSpec
from bugshare.lowerbound import max_delay_lower_bound, sum_delay_lower_bound


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--H", type=int, nargs="+", default=[50, 100, 200])
    parser.add_argument(
        "--dist", nargs="+", default=["U(0,1)", "N(0.5,0.2)", "N(0.5,0.4)"]
    )
    parser.add_argument("--n", type=int, nargs="+", default=[1, 2, 5, 10])
    args = parser.parse_args()

    resolutions = sorted(args.H)
    header = " ".join(f"H={H:<6}" for H in resolutions)
    print(f"{'row':>22} {'obj':>4} {header} max-drift")
    for label in args.dist:
        spec = DistributionSpec.parse(label)
        for n in args.n:
            for objective, fn in (
                ("max", max_delay_lower_bound),
                ("sum", sum_delay_lower_bound),
            ):
                values = [fn(spec, n, H) for H in resolutions]
                drift = max(
                    abs(b - a) for a, b in zip(values, values[1:])
                ) if len(values) > 1 else 0.0
                cells = " ".join(f"{v:8.4f}" for v in values)
                print(f"{label + f', n={n}':>22} {objective:>4} {cells} {drift:9.4f}")


if __name__ == "__main__":
    main()
