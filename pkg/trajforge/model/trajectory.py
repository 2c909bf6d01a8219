"""
Copyright © 2024 trajforge developers.

Core value types shared by every module. Each type validates its invariants on
construction, converts to a JSON-ready dict with a fixed field order, and keeps any
unknown JSON fields in ``extra`` so they are written back unchanged.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Sequence, Tuple, Union

from ..exceptions import RecordError

ActionInput = Union[str, Dict[str, Any], list]

# observation prefixes that flag a failed tool execution
ERROR_PREFIXES = (
    "API call failed:",
    "Tool execution timed out",
    "An error occurred while running the tool",
)
INVALID_TOOL_MARKER = " is not a valid tool, try one of "
# joins node ids into a trajectory sample id, so node ids must not contain it
ID_SEPARATOR = "_"


def is_error_observation(observation: str) -> bool:
    """Whether an observation text reports a failed execution."""
    text = observation.lstrip()
    return text.startswith(ERROR_PREFIXES) or INVALID_TOOL_MARKER in text


def _check_text(value, name: str, allow_none: bool = False):
    if value is None and allow_none:
        return
    if not isinstance(value, str):
        raise RecordError(f"expected text, got {type(value).__name__}", field=name)


def _check_action_input(value, name: str = "action_input"):
    if not isinstance(value, (str, dict, list)):
        raise RecordError(f"expected text or JSON object, got {type(value).__name__}",
                          field=name)


def _split_known(d: Dict[str, Any], fields: Sequence[str], required: Sequence[str]):
    if not isinstance(d, dict):
        raise RecordError(f"expected a JSON object, got {type(d).__name__}")
    for k in required:
        if k not in d:
            raise RecordError("missing required field", field=k)
    known = {k: d[k] for k in fields if k in d}
    extra = {k: v for k, v in d.items() if k not in fields}
    return known, extra


def action_input_text(action_input: ActionInput) -> str:
    """Render an action input the way it appears after ``Action Input:``."""
    if isinstance(action_input, str):
        return action_input
    return json.dumps(action_input, ensure_ascii=False)


@dataclass(frozen=True)
class AenNode:
    """One verified (query, action, observation) tool interaction."""
    id: str
    query: str
    action: str
    action_input: ActionInput
    observation: str
    image: Optional[str] = None
    step: Optional[int] = None
    reasoning: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict, repr=False)

    FIELDS = ("id", "query", "action", "action_input", "observation", "image", "step",
              "reasoning")

    def __post_init__(self):
        _check_text(self.id, "id")
        if not self.id:
            raise RecordError("node id must not be empty", field="id")
        if ID_SEPARATOR in self.id:
            raise RecordError(f"node id {self.id!r} must not contain {ID_SEPARATOR!r}",
                              field="id")
        _check_text(self.query, "query")
        _check_text(self.action, "action")
        if not self.action.strip():
            raise RecordError("action must not be empty", field="action")
        _check_action_input(self.action_input)
        _check_text(self.observation, "observation")
        _check_text(self.image, "image", allow_none=True)
        _check_text(self.reasoning, "reasoning", allow_none=True)
        if self.step is not None:
            if isinstance(self.step, bool) or not isinstance(self.step, int) or self.step < 0:
                raise RecordError("step must be a non-negative integer", field="step")

    @property
    def structured_input(self) -> Optional[Dict[str, Any]]:
        """The action input as a JSON object, when it is (or parses to) one."""
        if isinstance(self.action_input, dict):
            return self.action_input
        if isinstance(self.action_input, str):
            try:
                parsed = json.loads(self.action_input)
            except ValueError:
                return None
            return parsed if isinstance(parsed, dict) else None
        return None

    def annotate(self, step: int, reasoning: Optional[str]) -> AenNode:
        return replace(self, step=step, reasoning=reasoning)

    def to_dict(self) -> Dict[str, Any]:
        d = {k: getattr(self, k) for k in self.FIELDS}
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> AenNode:
        known, extra = _split_known(d, cls.FIELDS, ("id", "query", "action", "action_input",
                                                    "observation"))
        return cls(**known, extra=extra)


@dataclass(frozen=True)
class TrajectoryStep:
    index: int
    thought: str
    action: str
    action_input: ActionInput
    observation: str
    extra: Dict[str, Any] = field(default_factory=dict, repr=False)

    FIELDS = ("index", "thought", "action", "action_input", "observation")

    def __post_init__(self):
        if isinstance(self.index, bool) or not isinstance(self.index, int) or self.index < 1:
            raise RecordError("step index must be an integer >= 1", field="index")
        _check_text(self.thought, "thought")
        _check_text(self.action, "action")
        _check_action_input(self.action_input)
        _check_text(self.observation, "observation")

    def to_dict(self) -> Dict[str, Any]:
        d = {k: getattr(self, k) for k in self.FIELDS}
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> TrajectoryStep:
        known, extra = _split_known(d, cls.FIELDS, cls.FIELDS)
        return cls(**known, extra=extra)


@dataclass(frozen=True)
class MetaTrajectory:
    """Ordered (thought, action, observation) steps plus a final answer."""
    sample_id: str
    image: Optional[str]
    steps: Tuple[TrajectoryStep, ...]
    final_answer: str
    extra: Dict[str, Any] = field(default_factory=dict, repr=False)

    FIELDS = ("sample_id", "image", "steps", "final_answer")

    def __post_init__(self):
        _check_text(self.sample_id, "sample_id")
        _check_text(self.image, "image", allow_none=True)
        _check_text(self.final_answer, "final_answer")
        if not isinstance(self.steps, tuple):
            object.__setattr__(self, "steps", tuple(self.steps))
        if len(self.steps) < 1:
            raise RecordError("a trajectory needs at least one step", field="steps")
        for k, step in enumerate(self.steps):
            if not isinstance(step, TrajectoryStep):
                raise RecordError(f"step {k} is not a TrajectoryStep", field="steps")
            if step.index != k + 1:
                raise RecordError("step indices must be contiguous starting at 1",
                                  field="steps")

    def __len__(self):
        return len(self.steps)

    @property
    def actions(self) -> Tuple[str, ...]:
        return tuple(s.action for s in self.steps)

    @property
    def node_ids(self) -> Tuple[str, ...]:
        return tuple(self.sample_id.split(ID_SEPARATOR))

    def to_dict(self) -> Dict[str, Any]:
        d = {"sample_id": self.sample_id, "image": self.image,
             "steps": [s.to_dict() for s in self.steps],
             "final_answer": self.final_answer}
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> MetaTrajectory:
        known, extra = _split_known(d, cls.FIELDS, ("sample_id", "steps", "final_answer"))
        if not isinstance(known["steps"], list):
            raise RecordError("steps must be a list", field="steps")
        known["steps"] = tuple(TrajectoryStep.from_dict(s) for s in known["steps"])
        known.setdefault("image", None)
        return cls(**known, extra=extra)


@dataclass(frozen=True)
class Connection:
    """Scored, reasoned directed edge between two nodes."""
    src: str
    dst: str
    score: float
    reasoning: str
    extra: Dict[str, Any] = field(default_factory=dict, repr=False)

    FIELDS = ("src", "dst", "score", "reasoning")

    def __post_init__(self):
        _check_text(self.src, "src")
        _check_text(self.dst, "dst")
        if self.src == self.dst:
            raise RecordError("a connection cannot loop onto its source", field="dst")
        if isinstance(self.score, bool) or not isinstance(self.score, (int, float)):
            raise RecordError("score must be a real number", field="score")
        if not math.isfinite(self.score) or not 0. <= self.score <= 1.:
            raise RecordError(f"score {self.score} outside [0, 1]", field="score")
        _check_text(self.reasoning, "reasoning")

    def to_dict(self) -> Dict[str, Any]:
        d = {k: getattr(self, k) for k in self.FIELDS}
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> Connection:
        known, extra = _split_known(d, cls.FIELDS, cls.FIELDS)
        return cls(**known, extra=extra)


@dataclass(frozen=True)
class ToolCallRecord:
    tool: str
    input: str
    success: bool
    observation: str
    duration_ms: float = 0.
    extra: Dict[str, Any] = field(default_factory=dict, repr=False)

    FIELDS = ("tool", "input", "success", "observation", "duration_ms")

    def __post_init__(self):
        _check_text(self.tool, "tool")
        _check_text(self.input, "input")
        _check_text(self.observation, "observation")
        if not isinstance(self.success, bool):
            raise RecordError("success must be a boolean", field="success")
        if self.success == is_error_observation(self.observation):
            raise RecordError("success flag disagrees with the observation", field="success")
        if isinstance(self.duration_ms, bool) or not isinstance(self.duration_ms, (int, float)) \
                or self.duration_ms < 0:
            raise RecordError("duration must be a non-negative number", field="duration_ms")

    def to_dict(self) -> Dict[str, Any]:
        d = {k: getattr(self, k) for k in self.FIELDS}
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> ToolCallRecord:
        known, extra = _split_known(d, cls.FIELDS, ("tool", "input", "success", "observation"))
        return cls(**known, extra=extra)
