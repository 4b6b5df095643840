"""Increasing checkpoint sequences along which selective limits are taken."""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

from .errors import CheckpointError


class SubsequenceIndex:
    """A finite materialization of strictly increasing naturals k_1 < k_2 < ...

    Selective densities and distribution functions are evaluated only at
    these checkpoints.  ``rule`` is an optional human-readable closed form
    ("squares", "block ends", ...); ``name`` is a short label used when a
    family of indexes appears in one report.
    """

    def __init__(self, checkpoints: Iterable[int], rule: str | None = None,
                 name: str | None = None):
        arr = np.asarray(list(checkpoints) if not isinstance(checkpoints, np.ndarray)
                         else checkpoints, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise CheckpointError("checkpoint list must be a nonempty 1-d sequence")
        if arr[0] < 1:
            raise CheckpointError(f"checkpoints must start at 1 or later, got {arr[0]}")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise CheckpointError("checkpoints must be strictly increasing")
        arr.setflags(write=False)
        self.checkpoints = arr
        self.rule = rule
        self.name = name

    def __len__(self) -> int:
        return int(self.checkpoints.size)

    def __iter__(self) -> Iterator[int]:
        return iter(int(k) for k in self.checkpoints)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubsequenceIndex):
            return NotImplemented
        return (self.checkpoints.shape == other.checkpoints.shape
                and bool(np.all(self.checkpoints == other.checkpoints)))

    def __repr__(self) -> str:
        tag = self.name or self.rule or "explicit"
        return f"SubsequenceIndex({tag}, M={len(self)}, deepest={self.deepest})"

    @property
    def deepest(self) -> int:
        return int(self.checkpoints[-1])

    @property
    def label(self) -> str:
        return self.name or self.rule or f"kappa[M={len(self)}]"

    def take(self, indices: np.ndarray) -> "SubsequenceIndex":
        """Sub-index keeping the given positions (must be sorted)."""
        return SubsequenceIndex(self.checkpoints[indices], rule=self.rule,
                                name=self.name)

    def to_json_obj(self) -> dict:
        obj: dict = {"checkpoints": [int(k) for k in self.checkpoints]}
        if self.rule is not None:
            obj["rule"] = self.rule
        if self.name is not None:
            obj["name"] = self.name
        return obj
