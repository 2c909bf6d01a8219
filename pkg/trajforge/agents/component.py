"""
Copyright © 2024 trajforge developers.
"""
import logging
from typing import List, NamedTuple, Optional, Sequence

from ..exceptions import AssistantUnavailable
from ..model.trajectory import MetaTrajectory, ToolCallRecord
from ..parsing.coerce import coerce_action_input
from .config import AgentConfig, ExecutionLimits
from .loop import Reply, react_loop
from .templates import extra_params_str
from .tools import ToolRegistry, ToolSpec, execute_tool, failed_call

logger = logging.getLogger(__name__)


class ComponentResult(NamedTuple):
    trajectory: MetaTrajectory
    calls: List[ToolCallRecord]
    final_answer: str
    termination: str


def run_component(agent_name: str, sub_query: str, image: Optional[str],
                  tools: Sequence[ToolSpec], backend, limits: Optional[ExecutionLimits] = None,
                  config: Optional[AgentConfig] = None, assistant=None, clock=None,
                  sample_id: Optional[str] = None) -> ComponentResult:
    """
    Runs a component agent's tool loop over its own toolset.

    Each Action is coerced into the tool's input schema (directly, or through
    ``assistant``, the agent backend by default) and executed under
    ``limits.tool_timeout``. Every attempted call is recorded, including unknown tools and
    inputs that fail coercion.

    Returns
    -------
    result : ComponentResult
        trajectory, tool call records, final answer and termination
    """
    if not tools:
        raise ValueError(f"component {agent_name} needs at least one tool")
    config = config or AgentConfig()
    limits = limits or config.limits
    assistant = assistant if assistant is not None else backend
    registry = ToolRegistry(tools)
    calls: List[ToolCallRecord] = []
    instruction = config.instruction(agent_name).format(
        tool_descriptions=registry.describe(), tool_names=", ".join(registry.names),
        query=sub_query, img=image or "None", extra_params_str=extra_params_str(config.extra_params))

    def render(scratchpad: str) -> str:
        return config.component_template.format(extra_instruction=instruction,
                                                agent_scratchpad="Thought: " + scratchpad)

    def act(reply: Reply) -> str:
        if reply.action in registry:
            spec = registry.get(reply.action)
            try:
                structured = coerce_action_input(reply.raw_input, spec.model, assistant,
                                                 max_tokens=limits.max_generation)
            except (ValueError, AssistantUnavailable) as e:
                logger.warning("%s: input for %s rejected: %s", agent_name, reply.action, e)
                record = failed_call(reply.action, reply.raw_input, e)
                calls.append(record)
                return record.observation
        else:
            structured = reply.raw_input
        record = execute_tool(reply.action, structured, registry, limits.tool_timeout, clock)
        calls.append(record)
        return record.observation

    result = react_loop(render, backend, act, limits, [image] if image else [], clock)
    trajectory = MetaTrajectory(sample_id=f"{sample_id or 'query'}/{agent_name}", image=image,
                                steps=tuple(result.steps), final_answer=result.final_answer)
    return ComponentResult(trajectory, calls, result.final_answer, result.termination)
