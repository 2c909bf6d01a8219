"""
Copyright © 2024 trajforge developers.
"""
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from ..model.trajectory import MetaTrajectory
from ..parsing.react import FINAL_ANSWER_ACTION


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """ counts[a, b]: adjacent step pairs {a, b} across a corpus; symmetric """
    tools: Tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        n = len(self.tools)
        if counts.shape != (n, n):
            raise ValueError(f"counts must be {n}x{n}, got {counts.shape}")
        if (counts < 0).any() or not np.array_equal(counts, counts.T):
            raise ValueError("counts must be symmetric and non-negative")
        object.__setattr__(self, "tools", tuple(self.tools))
        object.__setattr__(self, "counts", counts)

    def index(self, tool: str) -> int:
        return self.tools.index(tool)

    def to_dict(self):
        return {"tools": list(self.tools), "counts": self.counts.tolist()}


def count_cooccurrence(trajectories: Iterable[MetaTrajectory],
                       tools: Optional[Sequence[str]] = None) -> CooccurrenceMatrix:
    """
    Counts each consecutive (step i, step i+1) tool pair once as an unordered pair.
    Terminal final-answer steps are not tool calls and are skipped. ``tools`` fixes the
    leading order of the matrix; names seen only in the corpus follow, sorted.
    """
    sequences = [[a for a in traj.actions if a != FINAL_ANSWER_ACTION]
                 for traj in trajectories]
    names = list(tools or [])
    seen = set(names)
    names += sorted({a for seq in sequences for a in seq} - seen)
    idx = {name: k for k, name in enumerate(names)}
    counts = np.zeros((len(names), len(names)), np.int64)
    for seq in sequences:
        for a, b in zip(seq[:-1], seq[1:]):
            i, j = idx[a], idx[b]
            counts[i, j] += 1
            if i != j:
                counts[j, i] += 1
    return CooccurrenceMatrix(tuple(names), counts)
