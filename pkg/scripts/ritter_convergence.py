#!/usr/bin/env python3
"""Grid refinement study on the Ritter dam break onto a dry bed.

Prints the L1 error of h at t = 6 s against the analytic solution and the
observed rate between successive grids, for first and second order.

    python3 scripts/ritter_convergence.py --sizes 100 200 400 800 1600
"""

from __future__ import annotations

import argparse
import math

from shallowflow.verification import run_ritter


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400, 800, 1600])
    parser.add_argument("--orders", type=int, nargs="+", default=[1, 2], choices=[1, 2])
    args = parser.parse_args()

    print(f"{'order':>5} {'N':>6} {'L1(h)':>12} {'rate':>6} {'min h':>10} {'steps':>6}")
    for order in args.orders:
        previous = None
        for n in args.sizes:
            l1, h_min, finite, sim = run_ritter(n, order=order)
            rate = f"{math.log2(previous / l1):6.3f}" if previous else f"{'':>6}"
            flag = "" if finite else "  non-finite values seen"
            print(f"{order:>5} {n:>6} {l1:12.4e} {rate} {h_min:10.2e} {sim.steps:>6}{flag}")
            previous = l1


if __name__ == "__main__":
    main()
