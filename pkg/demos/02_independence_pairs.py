#!/usr/bin/env python3
"""Average-of-products versus product-of-averages on three sequence pairs.

Case 1: two rotations by independent irrationals. The gap shrinks along
the schedule and both the schedule test and the rectangle test say
"independent".

Case 2: a sequence paired with itself. The identity integrand gives
delta -> 1/3 but product -> 1/4, so the gap settles near 1/12.

Case 3: a sequence paired with its mirror 1 - v. Dependent as well, and
the rectangle at corner (0.5, 0.5) shows exactly why: the two preimages
are disjoint, so the joint density is 0 while the product of marginals
is about 0.25.
"""

import numpy as np

from statindep import (
    AffineImageSequence,
    KroneckerSequence,
    SubsequenceIndex,
    UNIT,
    default_battery,
    delta_form,
    equivalence_harness,
    kappa_family_builder,
    product_form,
)

SCHEDULE = [100, 1000, 10000, 100000]


def show_trace(label, seqs, funcs):
    print(f"\n{label}")
    print("       N        delta      product          gap")
    for n in SCHEDULE:
        d = delta_form(seqs, funcs, n)
        p = product_form(seqs, funcs, n)
        print(f"  {n:>6}  {d:>11.6f}  {p:>11.6f}  {d - p:>+11.6f}")


def run_harness(seqs):
    report = equivalence_harness(seqs, default_battery(UNIT),
                                 kappa_family_builder(10 ** 4),
                                 SCHEDULE, tol=0.01)
    print(f"  schedule verdict: {report.statind.verdict} "
          f"(max terminal |gap| {report.statind.max_terminal_gap:.2e})")
    for outcome in report.outcomes:
        if outcome.tested:
            print(f"  rectangles along {outcome.kappa_label:<10} "
                  f"{outcome.report.verdict} "
                  f"(max |residual| {outcome.report.max_abs_residual:.2e})")
    print(f"  verdicts agree: {report.agreement}")


def main():
    ident = default_battery(UNIT).member("x")
    v = KroneckerSequence("sqrt2-1")
    u = KroneckerSequence("sqrt3-1")
    w = AffineImageSequence(v, -1.0, 1.0)

    show_trace("independent rotations (sqrt2-1, sqrt3-1), f = g = id",
               [v, u], [ident, ident])
    run_harness([v, u])

    show_trace("duplicated rotation (v, v), f = g = id; 1/3 - 1/4 = 1/12",
               [v, v], [ident, ident])

    show_trace("mirrored pair (v, 1-v), f = g = id", [v, w], [ident, ident])
    run_harness([v, w])


if __name__ == "__main__":
    main()
