"""
Copyright © 2024 trajforge developers.
"""
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Tuple

from ..exceptions import ConfigError
from .templates import (AGENT_DESCRIPTIONS, AGENT_INSTRUCTIONS, COMPONENT_SLOTS,
                        COMPONENT_TEMPLATE, GENERIC_INSTRUCTION, INSTRUCTION_SLOTS,
                        PLANNER_SLOTS, PLANNER_TEMPLATE, check_slots)

IMAGE_AGENT_TOOLS = ("BLIPTool", "CLIPTool", "QwenVLCaptionTool", "OncoTreeTool")
GENE_AGENT_TOOLS = ("PathwayKGTool", "EnsemblToDatabaseTool", "ProteinAtlasGeneInfoTool",
                    "DocumentGeneQueryTool", "GenetoDiseaseTool")


@dataclass(frozen=True)
class ExecutionLimits:
    max_iterations: int = 8
    tool_timeout: float = 300.
    max_generation: int = 2048
    max_execution_time: float = 0.  # 0 disables the total time limit
    temperature: float = 0.

    def __post_init__(self):
        for name in ("max_iterations", "tool_timeout", "max_generation"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"setting '{name}' must be strictly positive")
        if self.max_execution_time < 0:
            raise ConfigError("setting 'max_execution_time' must be non-negative")
        if self.temperature < 0:
            raise ConfigError("setting 'temperature' must be non-negative")

    @classmethod
    def from_settings(cls, settings):
        return cls(settings["max_iterations"], float(settings["tool_timeout"]),
                   settings["max_generation"], float(settings["max_execution_time"]),
                   float(settings["temperature"]))


@dataclass(frozen=True)
class ComponentSpec:
    agent_name: str
    tools: Tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.tools, tuple):
            object.__setattr__(self, "tools", tuple(self.tools))
        if not self.tools:
            raise ConfigError(f"component {self.agent_name} has no tools")


@dataclass(frozen=True)
class AgentConfig:
    """ prompt templates, descriptions and limits of the planner and its components """
    planner_template: str = PLANNER_TEMPLATE
    component_template: str = COMPONENT_TEMPLATE
    instructions: Mapping[str, str] = field(default_factory=lambda: dict(AGENT_INSTRUCTIONS))
    descriptions: Mapping[str, str] = field(default_factory=lambda: dict(AGENT_DESCRIPTIONS))
    limits: ExecutionLimits = field(default_factory=ExecutionLimits)
    extra_params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        check_slots(self.planner_template, PLANNER_SLOTS, "planner")
        check_slots(self.component_template, COMPONENT_SLOTS, "component")
        for name, instruction in self.instructions.items():
            check_slots(instruction, INSTRUCTION_SLOTS, name)

    def instruction(self, agent_name: str) -> str:
        return self.instructions.get(agent_name, GENERIC_INSTRUCTION)

    def description(self, agent_name: str, tools) -> str:
        return self.descriptions.get(agent_name, f"handles queries with {', '.join(tools)}.")

    @classmethod
    def from_settings(cls, settings):
        """ built-in templates, overridden by the JSON file named in ``agents_config`` """
        limits = ExecutionLimits.from_settings(settings)
        if not settings.get("agents_config"):
            return cls(limits=limits)
        with open(settings["agents_config"], "r", encoding="utf-8") as f:
            d = json.load(f)
        components = d.get("components", {})
        instructions = dict(AGENT_INSTRUCTIONS)
        descriptions = dict(AGENT_DESCRIPTIONS)
        for name, c in components.items():
            if "instruction" in c:
                instructions[name] = c["instruction"]
            if "description" in c:
                descriptions[name] = c["description"]
        limit_overrides = d.get("limits", {})
        if limit_overrides:
            merged = {**asdict(limits), **limit_overrides}
            limits = ExecutionLimits(**merged)
        return cls(planner_template=d.get("planner_template", PLANNER_TEMPLATE),
                   component_template=d.get("component_template", COMPONENT_TEMPLATE),
                   instructions=instructions, descriptions=descriptions, limits=limits,
                   extra_params=d.get("extra_params", {}))


def default_components(tool_names) -> List[ComponentSpec]:
    """ ImageAgent takes the image tools and OncoTree, GeneAgent the rest """
    image = [t for t in tool_names if t in IMAGE_AGENT_TOOLS]
    gene = [t for t in tool_names if t not in IMAGE_AGENT_TOOLS]
    out = []
    if image:
        out.append(ComponentSpec("ImageAgent", tuple(image)))
    if gene:
        out.append(ComponentSpec("GeneAgent", tuple(gene)))
    return out


def components_from_dict(d: Dict[str, Any]) -> List[ComponentSpec]:
    try:
        clusters = d["clusters"]
        specs = [ComponentSpec(c["agent_name"], tuple(c["tools"])) for c in clusters]
    except (KeyError, TypeError) as e:
        raise ConfigError(f"cluster config must look like "
                          f'{{"clusters": [{{"agent_name", "tools"}}]}}: {e}') from e
    names = [s.agent_name for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError("cluster config repeats an agent name")
    if not specs:
        raise ConfigError("cluster config holds no components")
    return specs


def load_components(path) -> List[ComponentSpec]:
    with open(path, "r", encoding="utf-8") as f:
        return components_from_dict(json.load(f))
