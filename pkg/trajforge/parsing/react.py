"""
Copyright © 2024 trajforge developers.

ReACT transcript parsing. Markers are matched on the UTF-8 bytes of the transcript so
that segment spans are byte offsets, the unit token offsets are given in.
"""
import json
import re
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from ..exceptions import InvalidSameStep, MissingAction, MissingActionInput
from ..model.trajectory import MetaTrajectory, TrajectoryStep, action_input_text

THOUGHT = "Thought"
ACTION = "Action"
ACTION_INPUT = "ActionInput"
OBSERVATION = "Observation"
FINAL_ANSWER = "FinalAnswer"
KINDS = (THOUGHT, ACTION, ACTION_INPUT, OBSERVATION, FINAL_ANSWER)

# terminal step action of agent trajectories that end in a Final Answer
FINAL_ANSWER_ACTION = "Final Answer"

RECOVERY_OBSERVATION = ("Could not parse Action / Action Input. Please follow the format: "
                        "Thought/Action/Action Input or Final Answer.")

_MARKER_KIND = {
    b"Thought": THOUGHT,
    b"Reasoning": THOUGHT,
    b"Action": ACTION,
    b"Action Input": ACTION_INPUT,
    b"Observation": OBSERVATION,
    b"Final Answer": FINAL_ANSWER,
}

# line start, optional indent, optional list bullet, optional bold around the marker
_MARKER = re.compile(
    rb"^[ \t]*(?:(?:[-*+]|\d+[.)])[ \t]+)?(?:\*\*)?"
    rb"(Thought|Reasoning|Action Input|Action|Observation|Final Answer)"
    rb"(?:\*\*)?[ \t]*:(?:\*\*)?",
    re.MULTILINE,
)
_WS = b" \t\r\n"
_FENCE = re.compile(r"^```[A-Za-z]*\s*|\s*```$")


class Segment(NamedTuple):
    kind: str
    span: Tuple[int, int]
    content_span: Tuple[int, int]
    content: str


class ParsedAction(NamedTuple):
    action: str
    raw_input: str
    structured_input: Optional[Dict[str, Any]]


def _as_bytes(text: Union[str, bytes]) -> bytes:
    if isinstance(text, bytes):
        return text
    return str(text).encode("utf-8", errors="surrogatepass")


def parse_transcript(text: Union[str, bytes]) -> List[Segment]:
    """
    Splits a transcript into marker-delimited segments.

    Each marker at the start of a line opens a segment that runs up to the next marker
    (or the end of the text). ``span`` covers the marker, ``content_span`` only the text
    after it with surrounding whitespace removed. Text before the first marker belongs
    to no segment (see ``leading_text``).

    Parameters
    ----------
    text : str or bytes (UTF-8)

    Returns
    -------
    segments : list of Segment, ordered by start offset
    """
    data = _as_bytes(text)
    matches = list(_MARKER.finditer(data))
    segments = []
    for k, m in enumerate(matches):
        end = matches[k + 1].start() if k + 1 < len(matches) else len(data)
        c0, c1 = m.end(), end
        while c0 < c1 and data[c0] in _WS:
            c0 += 1
        while c1 > c0 and data[c1 - 1] in _WS:
            c1 -= 1
        content = data[c0:c1].decode("utf-8", errors="replace")
        segments.append(Segment(_MARKER_KIND[m.group(1)], (m.start(), end), (c0, c1), content))
    return segments


def leading_text(text: Union[str, bytes], segments: Sequence[Segment]) -> str:
    """Text before the first marker, stripped (the thought of a reply continuing "Thought:")."""
    data = _as_bytes(text)
    stop = segments[0].span[0] if segments else len(data)
    return data[:stop].decode("utf-8", errors="replace").strip()


def action_sequence(segments: Sequence[Segment]) -> List[str]:
    """Cleaned action names in transcript order."""
    return [clean_action(s.content) for s in segments if s.kind == ACTION]


def clean_action(content: str) -> str:
    first = content.strip().split("\n", 1)[0] if content.strip() else ""
    return first.strip().strip("*`'\"[]() \t")


def _structured(raw: str) -> Optional[Dict[str, Any]]:
    try:
        parsed = json.loads(_FENCE.sub("", raw.strip()))
    except ValueError:
        return None
    return parsed if isinstance(parsed, dict) else None


def extract_action(segments: Sequence[Segment]) -> ParsedAction:
    """
    Returns the first Action / Action Input pair after the last Thought.

    Raises
    ------
    InvalidSameStep
        the step holds both an Action and a Final Answer
    MissingAction, MissingActionInput
        no usable Action or no Action Input following it
    """
    last_thought = -1
    for k, s in enumerate(segments):
        if s.kind == THOUGHT:
            last_thought = k
    tail = list(segments[last_thought + 1:])
    i_action = next((k for k, s in enumerate(tail) if s.kind == ACTION), None)
    if i_action is not None and any(s.kind == FINAL_ANSWER for s in tail):
        raise InvalidSameStep("Action and Final Answer in the same step")
    if i_action is None or not clean_action(tail[i_action].content):
        raise MissingAction("no Action after the last Thought")
    action = clean_action(tail[i_action].content)
    i_input = next((k for k in range(i_action + 1, len(tail))
                    if tail[k].kind == ACTION_INPUT), None)
    if i_input is None:
        raise MissingActionInput(f"no Action Input for action {action!r}")
    raw = tail[i_input].content
    return ParsedAction(action, raw, _structured(raw))


def inline_text(text: str) -> str:
    """
    ``text`` folded onto one line, so that none of its markers can open a segment when it
    is rendered after another marker.
    """
    return " ".join(text.split())


def final_answer(segments: Sequence[Segment]) -> Optional[str]:
    """Content of the last Final Answer segment, if any."""
    answers = [s.content for s in segments if s.kind == FINAL_ANSWER]
    return answers[-1] if answers else None


def render_steps(steps: Sequence[TrajectoryStep], thought_marker: str = "Thought") -> str:
    lines = []
    for step in steps:
        lines.append(f"{thought_marker}: {step.thought}")
        if step.action == FINAL_ANSWER_ACTION:
            continue
        lines.append(f"Action: {step.action}")
        lines.append(f"Action Input: {action_input_text(step.action_input)}")
        lines.append(f"Observation: {step.observation}")
    return "\n".join(lines)


def render_trajectory(traj: MetaTrajectory, thought_marker: str = "Thought") -> str:
    """
    ReACT text of a trajectory; ``parse_transcript`` followed by ``segments_to_steps``
    gives back its steps and final answer.
    """
    body = render_steps(traj.steps, thought_marker)
    return f"{body}\nFinal Answer: {traj.final_answer}"


def segments_to_steps(segments: Sequence[Segment]) -> Tuple[List[TrajectoryStep], Optional[str]]:
    """
    Rebuilds trajectory steps from segments: one step per Action, closed by the
    following Action Input and Observation. A Thought left pending when the Final Answer
    arrives becomes a terminal step; any other dangling Thought is dropped.
    """
    steps: List[TrajectoryStep] = []
    thought: Optional[str] = None
    current: Optional[Dict[str, Any]] = None
    answer = None

    def close():
        nonlocal current
        if current is not None:
            steps.append(TrajectoryStep(index=len(steps) + 1, **current))
            current = None

    for s in segments:
        if s.kind == THOUGHT:
            close()
            thought = s.content
        elif s.kind == ACTION:
            close()
            current = {"thought": thought or "", "action": clean_action(s.content),
                       "action_input": "", "observation": ""}
            thought = None
        elif s.kind == ACTION_INPUT and current is not None:
            current["action_input"] = s.content
        elif s.kind == OBSERVATION and current is not None:
            current["observation"] = s.content
        elif s.kind == FINAL_ANSWER:
            close()
            if thought is not None:
                steps.append(TrajectoryStep(index=len(steps) + 1, thought=thought,
                                            action=FINAL_ANSWER_ACTION, action_input="",
                                            observation=""))
                thought = None
            answer = s.content
    close()
    return steps, answer
