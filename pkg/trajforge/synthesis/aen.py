"""
Copyright © 2024 trajforge developers.
"""
import logging
from typing import Optional

from ..agents.loop import interpret_reply
from ..agents.templates import GENERIC_INSTRUCTION
from ..agents.tools import ToolRegistry, execute_tool, failed_call
from ..backends.base import CompletionRequest, complete
from ..exceptions import AssistantUnavailable, MissingAction
from ..model.trajectory import AenNode
from ..parsing.coerce import coerce_action_input
from ..parsing.react import RECOVERY_OBSERVATION

logger = logging.getLogger(__name__)

AEN_PROMPT = """<Context Begin>:
Please follow strict ReACT format (Thought/Action/Action Input) to solve tasks.
Choose exactly one tool call that gathers evidence for the question. Do not give a Final Answer.

{instruction}

Thought: {scratchpad}"""


def generate_aen(query: str, backend, registry: ToolRegistry, image: Optional[str] = None,
                 node_id: str = "0", assistant=None, tool_timeout: float = 300., clock=None,
                 max_tokens: int = 2048, temperature: float = 0.) -> AenNode:
    """
    Asks the backend for one (Action, Action Input) answering ``query``, executes it and
    returns the node holding the real observation, error observations included.

    Raises
    ------
    MissingAction
        the backend proposed no action, even after one retry with the recovery observation
    BackendError
        from the backend
    """
    if not len(registry):
        raise ValueError("generate_aen needs a non-empty tool registry")
    instruction = GENERIC_INSTRUCTION.format(
        tool_descriptions=registry.describe(), tool_names=", ".join(registry.names),
        query=query, img=image or "None", extra_params_str="")
    images = [image] if image else []

    def ask(scratchpad: str):
        prompt = AEN_PROMPT.format(instruction=instruction, scratchpad=scratchpad)
        request = CompletionRequest.for_prompt(prompt, images, max_tokens=max_tokens,
                                               temperature=temperature)
        return interpret_reply(complete(request, backend, max_tokens))

    reply = ask("")
    if reply.kind != "action":
        reply = ask(reply.text.strip() + f"\nObservation: {RECOVERY_OBSERVATION}\nThought: ")
    if reply.kind != "action":
        raise MissingAction(f"no tool call proposed for query {query!r}")

    action_input = reply.raw_input
    if reply.action in registry:
        spec = registry.get(reply.action)
        try:
            structured = coerce_action_input(reply.raw_input, spec.model,
                                             assistant if assistant is not None else backend,
                                             max_tokens=max_tokens)
        except (ValueError, AssistantUnavailable) as e:
            record = failed_call(reply.action, reply.raw_input, e)
        else:
            action_input = structured
            record = execute_tool(reply.action, structured, registry, tool_timeout, clock)
    else:
        record = execute_tool(reply.action, reply.raw_input, registry, tool_timeout, clock)
    logger.debug("node %s: %s (success=%s)", node_id, reply.action, record.success)
    return AenNode(node_id, query, reply.action, action_input, record.observation, image,
                   reasoning=reply.thought or None)
