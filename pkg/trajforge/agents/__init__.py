"""
Copyright © 2024 trajforge developers.
"""
from .tools import (ToolSpec, ToolRegistry, execute_tool, invalid_tool_message, failed_call,
                    build_registry, builtin_tools, load_plugins)
from .config import (ExecutionLimits, AgentConfig, ComponentSpec, default_components,
                     components_from_dict, load_components, IMAGE_AGENT_TOOLS,
                     GENE_AGENT_TOOLS)
from .lifecycle import ComponentLifecycle, ComponentHandle, component_lifecycle
from .loop import react_loop, interpret_reply, INVALID_FORMAT_ACTION
from .component import run_component, ComponentResult
from .planner import run_planner, query_id
from .templates import (PLANNER_TEMPLATE, COMPONENT_TEMPLATE, GENE_AGENT_INSTRUCTION,
                        IMAGE_AGENT_INSTRUCTION, extra_params_str)
