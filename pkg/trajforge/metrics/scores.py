"""
Copyright © 2024 trajforge developers.

Judge-free trajectory metrics.
"""
import string
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence, Set

from ..model.trajectory import ToolCallRecord

_PUNCTUATION = str.maketrans("", "", string.punctuation)


class ToolF1(NamedTuple):
    precision: float
    recall: float
    f1: float


def trajectory_success_score(valid_output: bool, calls: Sequence[ToolCallRecord]) -> float:
    """ 0.5 for a valid output plus 0.5 times the fraction of successful tool calls
    (a run without tool calls counts as fully successful) """
    ratio = sum(c.success for c in calls) / len(calls) if calls else 1.
    return 0.5 * float(bool(valid_output)) + 0.5 * ratio


def is_successful(score: float) -> bool:
    return score >= 1.


def tokenize(text: str) -> Set[str]:
    return set(text.lower().translate(_PUNCTUATION).split())


def jaccard_similarity(a: str, b: str) -> float:
    ta, tb = tokenize(a), tokenize(b)
    if not ta and not tb:
        return 1.
    return len(ta & tb) / len(ta | tb)


def tool_redundancy_rate(calls: Sequence[ToolCallRecord], theta: float = 0.7) -> float:
    """ share of call pairs that hit the same tool with inputs more than ``theta`` similar """
    if len(calls) < 2:
        return 0.
    pairs = list(combinations(calls, 2))
    redundant = sum(1 for a, b in pairs
                    if a.tool == b.tool and jaccard_similarity(a.input, b.input) > theta)
    return redundant / len(pairs)


def tool_consistency_f1(expected: Iterable[str], actual: Iterable[str]) -> ToolF1:
    expected, actual = set(expected), set(actual)
    if not expected and not actual:
        return ToolF1(1., 1., 1.)
    hit = len(expected & actual)
    precision = hit / len(actual) if actual else 0.
    recall = hit / len(expected) if expected else 0.
    if hit == 0:
        return ToolF1(precision, recall, 0.)
    return ToolF1(precision, recall, 2 * precision * recall / (precision + recall))
