#!/usr/bin/env python3
"""Constructive approximation: ramps around indicators, steps around curves.

sandwich_indicator brackets the indicator of [a, x) between two
piecewise-linear ramps whose integral gap against a CDF is at most
F(x+w) - F(x-w). step_envelope brackets a continuous function between
two step functions, refining the breakpoint grid until the Stieltjes
gap drops below the requested epsilon for every supplied CDF.
"""

import numpy as np

from statindep import (
    KroneckerSequence,
    SubsequenceIndex,
    UNIT,
    empirical_cdf,
    sandwich_indicator,
    step_envelope,
)


def main():
    cdf = empirical_cdf(KroneckerSequence("sqrt2-1"),
                        SubsequenceIndex([10 ** 4]))

    print("indicator sandwiches at x = 0.5:")
    print("   width     F(x+w)-F(x-w)")
    for width in (0.2, 0.05, 0.0125, 0.003125):
        s = sandwich_indicator(0.5, width, UNIT, cdf=cdf)
        print(f"  {width:>7.6g}   {s.gap_bound:.6f}")
    print("  (the bound tracks 2*width because the CDF is near-uniform)")

    s = sandwich_indicator(0.5, 0.05, UNIT, cdf=cdf)
    xs = np.array([0.0, 0.44, 0.46, 0.5, 0.54, 0.56, 1.0])
    print("\n  x:      " + "  ".join(f"{x:>6.2f}" for x in xs))
    print("  lower:  " + "  ".join(f"{v:>6.3f}" for v in s.lower(xs)))
    print("  1[v<x]: " + "  ".join(f"{float(x < 0.5):>6.3f}" for x in xs))
    print("  upper:  " + "  ".join(f"{v:>6.3f}" for v in s.upper(xs)))

    print("\nstep envelopes around f(t) = sin(2 pi t):")
    print("   epsilon    cells   achieved gap")
    for eps in (0.5, 0.1, 0.02, 0.004):
        env = step_envelope(lambda t: np.sin(2.0 * np.pi * t), [cdf], eps)
        cells = len(env.lower_step.levels)
        print(f"  {eps:>8.3f}  {cells:>6}   {env.gap_bound:.6f}")

    env = step_envelope(lambda t: np.sin(2.0 * np.pi * t), [cdf], 0.5)
    grid = np.linspace(0.0, 1.0, 2001)
    f_vals = np.sin(2.0 * np.pi * grid)
    below = np.all(env.lower_step(grid) <= f_vals)
    above = np.all(f_vals <= env.upper_step(grid))
    print(f"\npointwise domination on a 2001-point grid: "
          f"lower<=f {below}, f<=upper {above}")


if __name__ == "__main__":
    main()
