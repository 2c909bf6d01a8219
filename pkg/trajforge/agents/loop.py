"""
Copyright © 2024 trajforge developers.

The Thought/Action/Observation loop shared by the planner and the component agents.
"""
import logging
from typing import Callable, List, NamedTuple, Optional, Sequence

from ..backends.base import CompletionRequest, complete
from ..backends.clock import WallClock
from ..exceptions import ActionParseError, InvalidSameStep, MissingAction
from ..model.run import FINAL_ANSWER, ITERATION_LIMIT, STOP_MESSAGE, TIMEOUT
from ..model.trajectory import TrajectoryStep
from ..parsing.react import (FINAL_ANSWER_ACTION, OBSERVATION, RECOVERY_OBSERVATION, THOUGHT,
                             extract_action, final_answer, inline_text, leading_text,
                             parse_transcript)
from .config import ExecutionLimits

logger = logging.getLogger(__name__)

INVALID_FORMAT_ACTION = "InvalidFormat"


class Reply(NamedTuple):
    """ interpretation of one backend reply """
    kind: str  # "final", "action" or "invalid"
    thought: str
    action: str
    raw_input: str
    answer: Optional[str]
    text: str


def interpret_reply(text: str) -> Reply:
    """
    Classifies a reply as a Final Answer, an Action, or invalid. Anything from the first
    Observation marker on is ignored, it belongs to the environment.
    """
    segments = parse_transcript(text)
    cut = next((k for k, s in enumerate(segments) if s.kind == OBSERVATION), len(segments))
    segments = segments[:cut]
    thoughts = [s.content for s in segments if s.kind == THOUGHT]
    thought = thoughts[-1] if thoughts else leading_text(text, segments)
    try:
        parsed = extract_action(segments)
    except InvalidSameStep:
        return Reply("invalid", thought, "", "", None, text)
    except MissingAction:
        answer = final_answer(segments)
        if answer is not None:
            return Reply("final", thought, FINAL_ANSWER_ACTION, "", answer, text)
        return Reply("invalid", thought, "", "", None, text)
    except ActionParseError:
        return Reply("invalid", thought, "", "", None, text)
    return Reply("action", thought, parsed.action, parsed.raw_input, None, text)


def scratchpad_entry(thought: str, action: str, raw_input: str, observation: str) -> str:
    """ one step written as the continuation of a prompt ending in "Thought: " """
    return (f"{thought}\nAction: {action}\nAction Input: {raw_input}\n"
            f"Observation: {observation}\nThought: ")


class LoopResult(NamedTuple):
    steps: List[TrajectoryStep]
    final_answer: str
    termination: str


def react_loop(render: Callable[[str], str], backend, act: Callable[[Reply], str],
               limits: ExecutionLimits, images: Sequence[str] = (), clock=None) -> LoopResult:
    """
    Runs the loop until a Final Answer, ``limits.max_iterations`` steps or
    ``limits.max_execution_time`` seconds.

    Parameters
    ----------
    render : callable
        scratchpad text -> full prompt
    backend : completion backend
    act : callable
        executes an Action reply and returns the observation text
    limits : ExecutionLimits
    images : image references sent with every request
    clock : WallClock or FakeClock, optional

    Returns
    -------
    result : LoopResult
        steps (a final answer closes with a "Final Answer" step), the answer, termination
    """
    clock = clock or WallClock()
    start = clock.now()
    steps: List[TrajectoryStep] = []
    scratchpad = ""

    def ask(pad: str) -> Reply:
        request = CompletionRequest.for_prompt(render(pad), images,
                                               max_tokens=limits.max_generation,
                                               temperature=limits.temperature)
        return interpret_reply(complete(request, backend, limits.max_generation))

    while len(steps) < limits.max_iterations:
        reply = ask(scratchpad)
        if reply.kind == "invalid":
            logger.debug("malformed reply, retrying with the recovery observation")
            reply = ask(scratchpad + reply.text.strip() +
                        f"\nObservation: {RECOVERY_OBSERVATION}\nThought: ")
        index = len(steps) + 1
        if reply.kind == "final":
            steps.append(TrajectoryStep(index, reply.thought, FINAL_ANSWER_ACTION, "", ""))
            return LoopResult(steps, reply.answer, FINAL_ANSWER)
        if reply.kind == "invalid":
            logger.warning("reply still malformed after one retry")
            steps.append(TrajectoryStep(index, reply.thought, INVALID_FORMAT_ACTION,
                                        inline_text(reply.text), RECOVERY_OBSERVATION))
            scratchpad += (reply.text.strip() +
                           f"\nObservation: {RECOVERY_OBSERVATION}\nThought: ")
        else:
            observation = act(reply)
            steps.append(TrajectoryStep(index, reply.thought, reply.action, reply.raw_input,
                                        observation))
            scratchpad += scratchpad_entry(reply.thought, reply.action, reply.raw_input,
                                           observation)
        if limits.max_execution_time and clock.now() - start >= limits.max_execution_time:
            logger.warning("execution time limit of %gs reached", limits.max_execution_time)
            return LoopResult(steps, STOP_MESSAGE, TIMEOUT)
    return LoopResult(steps, STOP_MESSAGE, ITERATION_LIMIT)
