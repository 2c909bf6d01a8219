"""
Copyright © 2024 trajforge developers.
"""
import hashlib
import logging
from typing import List, Optional, Sequence

from ..model.run import ComponentRun, RunRecord
from ..model.trajectory import MetaTrajectory
from .component import run_component
from .config import AgentConfig, ComponentSpec, ExecutionLimits
from .lifecycle import ComponentLifecycle
from .loop import Reply, react_loop
from .templates import extra_params_str
from .tools import ToolRegistry, invalid_tool_message

logger = logging.getLogger(__name__)


def query_id(query: str) -> str:
    return hashlib.sha256(query.encode("utf-8")).hexdigest()[:12]


def run_planner(query: str, image: Optional[str], backend, components: Sequence[ComponentSpec],
                registry: ToolRegistry, limits: Optional[ExecutionLimits] = None,
                config: Optional[AgentConfig] = None, assistant=None, clock=None,
                lifecycle: Optional[ComponentLifecycle] = None,
                sample_id: Optional[str] = None) -> RunRecord:
    """
    Runs the planner: each Action delegates its Action Input as a sub-query to the named
    component agent, whose final answer becomes the Observation.

    Parameters
    ----------
    query : str
    image : str, optional
        image reference passed to the backend and to every component
    backend : completion backend shared by the planner and all components
    components : sequence of ComponentSpec
        agent names with the registry tools each may call
    registry : ToolRegistry
    limits : ExecutionLimits, optional
        defaults to ``config.limits``
    config : AgentConfig, optional
    assistant : backend for action-input coercion, defaults to ``backend``
    clock : WallClock or FakeClock, optional
    lifecycle : ComponentLifecycle, optional
        gauges component instantiation; a fresh one per run by default
    sample_id : str, optional
        defaults to a hash of the query

    Returns
    -------
    record : RunRecord

    Raises
    ------
    BackendError
        aborts the run; live component handles are released first
    LeakDetected
        a component handle outlived the run
    """
    if not components:
        raise ValueError("run_planner needs at least one component")
    config = config or AgentConfig()
    limits = limits or config.limits
    lifecycle = lifecycle or ComponentLifecycle()
    sample_id = sample_id or query_id(query)
    by_name = {c.agent_name: c for c in components}
    runs: List[ComponentRun] = []
    descriptions = "\n".join(f"- {c.agent_name}: {config.description(c.agent_name, c.tools)}"
                             for c in components)
    extra = extra_params_str(config.extra_params)

    def render(scratchpad: str) -> str:
        return config.planner_template.format(agent_descriptions=descriptions, query=query,
                                              img=image or "None", extra_params_str=extra,
                                              agent_scratchpad=scratchpad)

    def act(reply: Reply) -> str:
        spec = by_name.get(reply.action)
        if spec is None:
            logger.warning("planner named unknown component %r", reply.action)
            return invalid_tool_message(reply.action, list(by_name))
        with lifecycle.acquire(spec.agent_name):
            result = run_component(spec.agent_name, reply.raw_input, image,
                                   [registry.get(t) for t in spec.tools], backend, limits,
                                   config, assistant, clock, sample_id)
        runs.append(ComponentRun(spec.agent_name, result.trajectory, tuple(result.calls),
                                 result.termination))
        return result.final_answer

    try:
        result = react_loop(render, backend, act, limits, [image] if image else [], clock)
    finally:
        lifecycle.check()
    trajectory = MetaTrajectory(sample_id=sample_id, image=image, steps=tuple(result.steps),
                                final_answer=result.final_answer)
    return RunRecord(sample_id=sample_id, query=query, image=image,
                     planner_trajectory=trajectory, component_runs=tuple(runs),
                     final_answer=result.final_answer, termination=result.termination)
