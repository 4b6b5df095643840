"""Counting functions, asymptotic density, and selective (kappa) density.

A subset S of the naturals is described by a deterministic membership
predicate.  Densities are finite-prefix ratios count(S, N) / N reported
with a trailing-window Cauchy diagnostic instead of a bare limit claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CheckpointError, IntervalError
from .sequences import BoundedSequence
from .subsequence import SubsequenceIndex


@dataclass
class SetMembership:
    """Deterministic membership test for a subset of the naturals.

    ``indicator(N)`` returns membership of 1..N as a bool array; factory
    functions that can do better attach a vectorized ``bulk`` implementation,
    otherwise the predicate is looped.
    """

    description: str
    predicate: Callable[[int], bool]
    bulk: Callable[[int], np.ndarray] | None = None

    def contains(self, n: int) -> bool:
        return bool(self.predicate(n))

    def indicator(self, n_max: int) -> np.ndarray:
        if self.bulk is not None:
            out = np.asarray(self.bulk(n_max), dtype=bool)
        else:
            out = np.fromiter((self.predicate(n) for n in range(1, n_max + 1)),
                              dtype=bool, count=n_max)
        return out

    def complement(self) -> "SetMembership":
        bulk = None if self.bulk is None else (lambda n_max: ~self.indicator(n_max))
        return SetMembership(description=f"not({self.description})",
                             predicate=lambda n: not self.predicate(n),
                             bulk=bulk)


@dataclass
class DensityEstimate:
    """Finite-prefix density with convergence diagnostics.

    ``trace`` holds (checkpoint, ratio) at every checkpoint; ``converged``
    means the last ``window`` ratios vary by at most ``tol``.
    """

    value: float
    trace: list[tuple[int, float]]
    oscillation: float
    converged: bool
    tol: float
    window: int

    def ratios(self) -> np.ndarray:
        return np.asarray([r for _, r in self.trace], dtype=np.float64)


def prefix_count(s: SetMembership, n: int) -> int:
    """|S intersect [1, n]|, exactly."""
    if n < 1:
        raise ValueError(f"prefix length must be >= 1, got {n}")
    return int(s.indicator(n).sum())


def kappa_density(s: SetMembership, kappa: SubsequenceIndex,
                  tol: float = 1e-2, window: int = 5) -> DensityEstimate:
    """Density of S along the checkpoints of kappa.

    The counting pass is exact (integer cumulative sums); each trace ratio
    is the single correctly rounded division count / k.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if len(kappa) < window:
        raise CheckpointError(
            f"kappa has {len(kappa)} checkpoints but the diagnostic window needs "
            f"{window}; deepen kappa")
    checkpoints = kappa.checkpoints
    ind = s.indicator(int(checkpoints[-1]))
    csum = np.cumsum(ind, dtype=np.int64)
    counts = csum[checkpoints - 1]
    ratios = counts / checkpoints
    tail = ratios[-window:]
    oscillation = float(tail.max() - tail.min())
    return DensityEstimate(
        value=float(ratios[-1]),
        trace=[(int(k), float(r)) for k, r in zip(checkpoints, ratios)],
        oscillation=oscillation,
        converged=oscillation <= tol,
        tol=tol,
        window=window,
    )


def preimage(seq: BoundedSequence, lo: float, hi: float,
             closed_right: bool = False) -> SetMembership:
    """The set {n : v(n) in [lo, hi)} (or [lo, b] with ``closed_right``).

    ``closed_right`` is only meaningful for hi == b, where it closes the
    interval so the full-interval preimage carries total mass.
    """
    a, b = seq.interval.a, seq.interval.b
    if not lo <= hi:
        raise IntervalError(f"inverted bounds [{lo}, {hi})")
    if lo < a or hi > b:
        raise IntervalError(
            f"preimage window [{lo}, {hi}) must sit inside [{a}, {b}]")
    if closed_right and hi != b:
        raise IntervalError(
            f"closed_right is only available for the full right endpoint {b}, got {hi}")

    if closed_right:
        def predicate(n: int) -> bool:
            return lo <= seq.eval(n)

        def bulk(n_max: int) -> np.ndarray:
            return seq.prefix(n_max).values >= lo

        desc = f"{seq.label}^-1([{lo:g}, {hi:g}])"
    else:
        def predicate(n: int) -> bool:
            return lo <= seq.eval(n) < hi

        def bulk(n_max: int) -> np.ndarray:
            vals = seq.prefix(n_max).values
            return (vals >= lo) & (vals < hi)

        desc = f"{seq.label}^-1([{lo:g}, {hi:g}))"
    return SetMembership(description=desc, predicate=predicate, bulk=bulk)


def intersect(sets: Sequence[SetMembership]) -> SetMembership:
    """Conjunction of the given membership sets."""
    if not sets:
        raise ValueError("intersect needs at least one set")
    if len(sets) == 1:
        only = sets[0]
        return SetMembership(description=only.description,
                             predicate=only.predicate, bulk=only.bulk)
    members = list(sets)

    def predicate(n: int) -> bool:
        return all(s.predicate(n) for s in members)

    def bulk(n_max: int) -> np.ndarray:
        out = members[0].indicator(n_max)
        for s in members[1:]:
            out = out & s.indicator(n_max)
        return out

    return SetMembership(description=" & ".join(s.description for s in members),
                         predicate=predicate, bulk=bulk)


def from_predicate(predicate: Callable[[int], bool], description: str,
                   bulk: Callable[[int], np.ndarray] | None = None) -> SetMembership:
    """Wrap a plain predicate; supply ``bulk`` when a vectorized form exists."""
    return SetMembership(description=description, predicate=predicate, bulk=bulk)
