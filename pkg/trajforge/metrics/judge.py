"""
Copyright © 2024 trajforge developers.

LLM-judged metrics. The judge is any completion backend; its reply must contain a
decimal score in [0, 1].
"""
import logging
import re
from typing import NamedTuple, Optional, Sequence

from ..backends.base import CompletionRequest, complete
from ..exceptions import BackendError, JudgeUnavailable, UnparsableScore

logger = logging.getLogger(__name__)

CONSISTENCY_PROMPT = """Compare the model answer with the reference answer.
Rate how consistent their meaning is, from 0 (contradictory or unrelated) to 1 (equivalent).
Reply with a single decimal number between 0 and 1.

Reference answer: {reference}
Model answer: {answer}"""

HALLUCINATION_PROMPT = """Decide whether the answer states facts that are not supported by the question or by the tool observations in the trajectory.
Rate the degree of hallucination from 0 (fully supported) to 1 (fabricated).
Reply with a single decimal number between 0 and 1.

Question: {question}
Trajectory:
{trajectory}
Answer: {answer}"""

CHOICE_PROMPT = """A multiple-choice question was answered with the text below.
Rate how closely the answer selects the correct option, from 0 (another option) to 1 (the correct option).
Reply with a single decimal number between 0 and 1.

Correct option: {correct}
Answer: {predicted}"""

_NUMBER = re.compile(r"[-+]?(?:\d+\.\d*|\.\d+|\d+)")


class HallucinationItem(NamedTuple):
    question: str
    answer: str
    trajectory: str


def parse_score(reply: str) -> float:
    """ first number in the reply, clamped to [0, 1] """
    m = _NUMBER.search(reply)
    if m is None:
        raise UnparsableScore(f"judge reply holds no score: {reply[:200]!r}")
    return min(max(float(m.group(0)), 0.), 1.)


def judge_score(prompt: str, judge, max_tokens: int = 16) -> float:
    if judge is None:
        raise JudgeUnavailable("no judge configured")
    try:
        reply = complete(CompletionRequest.for_prompt(prompt, max_tokens=max_tokens), judge,
                         max_tokens)
    except BackendError as e:
        raise JudgeUnavailable(f"judge failed: {e}") from e
    return parse_score(reply)


def answer_consistency(reference: str, model_answer: str, judge) -> float:
    return judge_score(CONSISTENCY_PROMPT.format(reference=reference, answer=model_answer),
                       judge)


def hallucination_score(item: HallucinationItem, judge) -> float:
    return judge_score(HALLUCINATION_PROMPT.format(question=item.question, answer=item.answer,
                                                   trajectory=item.trajectory), judge)


def hallucination_rate(items: Sequence[HallucinationItem], judge) -> float:
    """ fraction of items the judge scores above 0.5 """
    if not items:
        logger.warning("hallucination rate over an empty item list (n = 0)")
        return 0.
    scores = [hallucination_score(item, judge) for item in items]
    return sum(s > 0.5 for s in scores) / len(scores)


def mc_accuracy(predicted: str, correct: str, judge: Optional[object] = None) -> float:
    """ 1 on an exact (trimmed, case-folded) match, else the judge's similarity or 0 """
    if predicted.strip().casefold() == correct.strip().casefold():
        return 1.
    if judge is None:
        return 0.
    return judge_score(CHOICE_PROMPT.format(correct=correct, predicted=predicted), judge)
