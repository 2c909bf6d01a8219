"""
Copyright © 2024 trajforge developers.

Prompt templates of the planner and the component agents.
"""
import string
from typing import Iterable, Mapping

from ..exceptions import ConfigError

PLANNER_SLOTS = ("query", "img", "extra_params_str", "agent_scratchpad")
COMPONENT_SLOTS = ("extra_instruction", "agent_scratchpad")
INSTRUCTION_SLOTS = ("tool_descriptions", "tool_names", "query", "img", "extra_params_str")

PLANNER_TEMPLATE = """<Context Begin>:
You are a master planner. Analyze the user's query and decide whether to answer directly or delegate to a specialized agent.

Please strictly follow the ReACT format, and give dialogues in Thought/Action/Action Input loop.

Available Specialist Agents:
{agent_descriptions}

If you can answer the query directly, respond with:
Final Answer: [your direct answer]

If the query requires a specialist, strictly follow the ReACT format:
Thought: The information obtained so far regarding the user query, along with the sub-agents that need to be invoked next and the aspects that require further discussion.
Action: [agent_name]
Action Input: [detailed sub query]

Example:
User query: "What is the role of TP53 in cancer?"

Thought: To answer the effects of TP53, I need to call sub-agent xx to investigate yy.
Action: GeneAgent
Action Input: Explain the role and function of TP53 gene in cancer development.

Once you believe the summaries from the sub-agents are sufficient to answer the user's question, please output Final Answer and provide the summarized answer to the question. Repeatedly calling the same sub-agent and asking the same query is meaningless.

Begin!

User Query: <Question>: {query}
<Image>: {img}
Extra parameters:
{extra_params_str}
Thought: {agent_scratchpad}"""

COMPONENT_TEMPLATE = """<Context Begin>:
Please follow strict ReACT format (Thought/Action/Action Input) to solve tasks.

Thought: what should I do?
Action: the subagent or tool to use, return only the subagent or tool name without any redundance
Action Input: the input to the subagent or tool

(Observation will be provided after tool execution)

Launch Thought/Action/Action Loop as needed, repeatedly generating the same action and action input is not suggested.

If you think you have enough information or you cannot solve the query anymore, please provide:
Final Answer: your final answer to the question

You MUST NOT output "Final Answer" in the same step as "Action" and "Action Input". If you do so, your output will be considered INVALID and ignored.

Specific requirements are given below:

{extra_instruction}

{agent_scratchpad}"""

_INSTRUCTION_TAIL = """You have access to the following tools:

{tool_descriptions}

<Question>: {query}
<Image>: {img}

Extra parameters:
{extra_params_str}

Use the following format to solve a given question:
Thought: what should I do?
Action: must be one of [{tool_names}]
Action Input: the input to the tool

(Observation will be provided after tool execution)"""

GENE_AGENT_INSTRUCTION = ("You are a gene expert. Answer gene-related queries by tool "
                          "calling.\n" + _INSTRUCTION_TAIL)

IMAGE_AGENT_INSTRUCTION = ("You are an image expert. Analyze histopathology slides by tool "
                           "calling.\nYou are encouraged to give hypotheses based on the "
                           "pathology image you see.\n\n" + _INSTRUCTION_TAIL)

GENERIC_INSTRUCTION = ("You are a specialist agent. Answer the query by tool calling.\n"
                       + _INSTRUCTION_TAIL)

AGENT_DESCRIPTIONS = {
    "GeneAgent": "answers gene-related queries with gene, disease and pathway databases.",
    "ImageAgent": "analyzes histopathology images and maps findings to tumor taxonomies.",
}

AGENT_INSTRUCTIONS = {
    "GeneAgent": GENE_AGENT_INSTRUCTION,
    "ImageAgent": IMAGE_AGENT_INSTRUCTION,
}


def template_slots(template: str) -> set:
    return {name for _, name, _, _ in string.Formatter().parse(template) if name}


def check_slots(template: str, required: Iterable[str], what: str):
    """ raises ConfigError if ``template`` misses a required slot """
    missing = [s for s in required if s not in template_slots(template)]
    if missing:
        raise ConfigError(f"{what} template lacks slot(s) {', '.join('{' + s + '}' for s in missing)}")


def extra_params_str(extra: Mapping[str, object]) -> str:
    """ "key: value" lines """
    return "\n".join(f"{k}: {v}" for k, v in extra.items())
