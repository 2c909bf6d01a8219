"""
Copyright © 2024 trajforge developers.
"""
import logging
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ..backends.base import CompletionRequest, complete
from ..exceptions import BadRatios
from ..model.trajectory import MetaTrajectory
from ..parsing.react import render_trajectory

logger = logging.getLogger(__name__)


class FilterResult(NamedTuple):
    kept: List[MetaTrajectory]
    rejections: List[Dict[str, str]]


class DatasetSplit(NamedTuple):
    train: List[MetaTrajectory]
    validation: List[MetaTrajectory]
    test: List[MetaTrajectory]


def filter_trajectories(trajectories: Sequence[MetaTrajectory], min_nodes: int = 2,
                        max_nodes: int = 8,
                        semantic_filter: Optional[Callable[[MetaTrajectory], bool]] = None
                        ) -> FilterResult:
    """ keeps trajectories of min_nodes..max_nodes steps passing ``semantic_filter`` """
    kept, rejections = [], []
    for traj in trajectories:
        n = len(traj.steps)
        if n < min_nodes:
            reason = f"too short: {n} < {min_nodes} nodes"
        elif n > max_nodes:
            reason = f"too long: {n} > {max_nodes} nodes"
        elif semantic_filter is not None and not semantic_filter(traj):
            reason = "rejected by semantic filter"
        else:
            kept.append(traj)
            continue
        rejections.append({"sample_id": traj.sample_id, "reason": reason})
    return FilterResult(kept, rejections)


SEMANTIC_PROMPT = """Does the following agent trajectory stay on topic and reach an answer supported by its observations?
Reply with Yes or No.

{trajectory}"""


def judge_filter(judge, max_tokens: int = 16) -> Callable[[MetaTrajectory], bool]:
    """ semantic filter asking ``judge`` for a Yes/No verdict """

    def accept(traj: MetaTrajectory) -> bool:
        prompt = SEMANTIC_PROMPT.format(trajectory=render_trajectory(traj))
        reply = complete(CompletionRequest.for_prompt(prompt, max_tokens=max_tokens), judge,
                         max_tokens)
        return reply.strip().lower().startswith("yes")

    return accept


def apportion(n: int, ratios: Sequence[int]) -> List[int]:
    """ largest-remainder counts of n items for integer ratios summing to 100 """
    floors = [n * r // 100 for r in ratios]
    remainders = [n * r % 100 for r in ratios]
    order = sorted(range(len(ratios)), key=lambda k: (-remainders[k], k))
    for k in order[:n - sum(floors)]:
        floors[k] += 1
    return floors


def _ratios(ratios) -> Tuple[int, int, int]:
    if isinstance(ratios, str):
        parts = ratios.split(":")
    else:
        parts = list(ratios)
    try:
        values = tuple(int(p) for p in parts)
    except (TypeError, ValueError):
        raise BadRatios(f"ratios must be integers, got {ratios!r}") from None
    if len(values) != 3 or min(values) < 0 or sum(values) != 100:
        raise BadRatios(f"need three non-negative ratios summing to 100, got {ratios!r}")
    return values


def split_dataset(trajectories: Sequence[MetaTrajectory],
                  ratios: Union[str, Sequence[int]] = (85, 5, 10),
                  seed: int = 37) -> DatasetSplit:
    """
    Seeded shuffle, then contiguous train/validation/test partition with
    largest-remainder counts (ties go to the earlier split).

    Raises
    ------
    BadRatios
    """
    values = _ratios(ratios)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(trajectories))
    shuffled = [trajectories[k] for k in order]
    n_train, n_val, _ = apportion(len(shuffled), values)
    return DatasetSplit(shuffled[:n_train], shuffled[n_train:n_train + n_val],
                        shuffled[n_train + n_val:])
