"""
Copyright © 2024 trajforge developers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..exceptions import RecordError
from .trajectory import MetaTrajectory, ToolCallRecord, _split_known

FINAL_ANSWER = "FinalAnswer"
ITERATION_LIMIT = "IterationLimit"
TIMEOUT = "Timeout"
TERMINATIONS = (FINAL_ANSWER, ITERATION_LIMIT, TIMEOUT)

STOP_MESSAGE = "Agent stopped due to iteration limit or time limit."


@dataclass(frozen=True)
class ComponentRun:
    agent: str
    trajectory: MetaTrajectory
    calls: Tuple[ToolCallRecord, ...]
    termination: str = FINAL_ANSWER

    def __post_init__(self):
        if not isinstance(self.calls, tuple):
            object.__setattr__(self, "calls", tuple(self.calls))
        if self.termination not in TERMINATIONS:
            raise RecordError(f"unknown termination {self.termination!r}", field="termination")

    def to_dict(self) -> Dict[str, Any]:
        return {"agent": self.agent, "trajectory": self.trajectory.to_dict(),
                "calls": [c.to_dict() for c in self.calls], "termination": self.termination}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> ComponentRun:
        known, _ = _split_known(d, ("agent", "trajectory", "calls", "termination"),
                                ("agent", "trajectory", "calls"))
        return cls(agent=known["agent"],
                   trajectory=MetaTrajectory.from_dict(known["trajectory"]),
                   calls=tuple(ToolCallRecord.from_dict(c) for c in known["calls"]),
                   termination=known.get("termination", FINAL_ANSWER))


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one planner run: its trajectory, every component run and the answer."""
    sample_id: str
    query: str
    image: Optional[str]
    planner_trajectory: MetaTrajectory
    component_runs: Tuple[ComponentRun, ...]
    final_answer: str
    termination: str
    extra: Dict[str, Any] = field(default_factory=dict, repr=False)

    FIELDS = ("sample_id", "query", "image", "planner_trajectory", "component_runs",
              "final_answer", "termination")

    def __post_init__(self):
        if not isinstance(self.component_runs, tuple):
            object.__setattr__(self, "component_runs", tuple(self.component_runs))
        if self.termination not in TERMINATIONS:
            raise RecordError(f"unknown termination {self.termination!r}", field="termination")

    @property
    def calls(self) -> List[ToolCallRecord]:
        """Every tool call made while answering, in execution order."""
        return [c for run in self.component_runs for c in run.calls]

    @property
    def valid_output(self) -> bool:
        return self.termination == FINAL_ANSWER

    def to_dict(self) -> Dict[str, Any]:
        d = {"sample_id": self.sample_id, "query": self.query, "image": self.image,
             "planner_trajectory": self.planner_trajectory.to_dict(),
             "component_runs": [r.to_dict() for r in self.component_runs],
             "final_answer": self.final_answer, "termination": self.termination}
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> RunRecord:
        known, extra = _split_known(d, cls.FIELDS, cls.FIELDS)
        return cls(sample_id=known["sample_id"], query=known["query"], image=known["image"],
                   planner_trajectory=MetaTrajectory.from_dict(known["planner_trajectory"]),
                   component_runs=tuple(ComponentRun.from_dict(r)
                                        for r in known["component_runs"]),
                   final_answer=known["final_answer"], termination=known["termination"],
                   extra=extra)
