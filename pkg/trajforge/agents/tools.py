"""
Copyright © 2024 trajforge developers.

Tool specifications, the registry, and timed tool execution.
"""
import importlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor, TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping

from ..backends.cassette import CassetteTransport
from ..backends.clock import WallClock
from ..backends.mock import image_tool, mock_tool
from ..backends.mygene import MyGeneClient
from ..backends.oncotree import OncoTreeClient
from ..exceptions import ConfigError, UnknownTool
from ..model.trajectory import ToolCallRecord, is_error_observation
from ..parsing.coerce import schema_model

logger = logging.getLogger(__name__)

ERROR_RUNNING = "An error occurred while running the tool. Please try again. Error: {error}"


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    input_schema: Mapping[str, Any]
    executor: Callable[[Dict[str, Any]], str] = field(compare=False, repr=False)

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise ValueError(f"tool name must be a non-empty word, got {self.name!r}")
        # fails early on unsupported field types
        schema_model(self.name, self.input_schema)

    @property
    def model(self):
        return schema_model(self.name, self.input_schema)


class ToolRegistry:
    """ name -> ToolSpec, in registration order """

    def __init__(self, tools: Iterable[ToolSpec] = ()):
        self._tools: Dict[str, ToolSpec] = {}
        for t in tools:
            self.register(t)

    def register(self, spec: ToolSpec):
        if spec.name in self._tools:
            raise ValueError(f"tool {spec.name!r} is already registered")
        self._tools[spec.name] = spec

    def get(self, name: str) -> ToolSpec:
        try:
            return self._tools[name]
        except KeyError:
            raise UnknownTool(invalid_tool_message(name, self.names)) from None

    @property
    def names(self) -> List[str]:
        return list(self._tools)

    def subset(self, names: Iterable[str]) -> "ToolRegistry":
        return ToolRegistry(self.get(n) for n in names)

    def describe(self) -> str:
        return "\n".join(f"{t.name}: {t.description}" for t in self._tools.values())

    def __contains__(self, name) -> bool:
        return name in self._tools

    def __iter__(self) -> Iterator[ToolSpec]:
        return iter(self._tools.values())

    def __len__(self):
        return len(self._tools)


def invalid_tool_message(name: str, names: Iterable[str]) -> str:
    return f"{name} is not a valid tool, try one of [{', '.join(names)}]."


def failed_call(name: str, input_text: str, error) -> ToolCallRecord:
    """ record of a call that never reached the executor (bad input) """
    return ToolCallRecord(tool=name, input=input_text, success=False,
                          observation=ERROR_RUNNING.format(error=error), duration_ms=0.)


def execute_tool(name: str, structured_input, registry: ToolRegistry, timeout: float = 300.,
                 clock=None) -> ToolCallRecord:
    """
    Runs a registered tool under a wall-clock timeout. Nothing raises: unknown tools,
    executor exceptions and timeouts all become failed records.

    Parameters
    ----------
    name : str
    structured_input : dict or str
    registry : ToolRegistry
    timeout : float
        seconds; a run is timed out when either the executor does not return in time or
        ``clock`` reports more elapsed time than allowed
    clock : WallClock or FakeClock, optional

    Returns
    -------
    record : ToolCallRecord
    """
    clock = clock or WallClock()
    input_text = structured_input if isinstance(structured_input, str) else \
        json.dumps(structured_input, ensure_ascii=False)
    if name not in registry:
        logger.warning("unknown tool %r", name)
        return ToolCallRecord(tool=name, input=input_text, success=False,
                              observation=invalid_tool_message(name, registry.names),
                              duration_ms=0.)
    spec = registry.get(name)
    start = clock.now()
    timed_out = False
    pool = ThreadPoolExecutor(max_workers=1, thread_name_prefix=f"tool-{name}")
    try:
        future = pool.submit(spec.executor, structured_input)
        try:
            output = future.result(timeout=timeout)
            observation = output if isinstance(output, str) else str(output)
        except FutureTimeout:
            timed_out = True
        except Exception as e:
            observation = f"API call failed: {e}"
    finally:
        pool.shutdown(wait=False)
    elapsed = max(clock.now() - start, 0.)
    if timed_out or elapsed > timeout:
        observation = f"Tool execution timed out after {timeout:g}s"
        elapsed = min(elapsed, timeout) if not timed_out else timeout
        logger.warning("tool %s timed out after %gs", name, timeout)
    elif is_error_observation(observation):
        logger.warning("tool %s failed: %s", name, observation[:200])
    return ToolCallRecord(tool=name, input=input_text,
                          success=not is_error_observation(observation),
                          observation=observation, duration_ms=elapsed * 1000.)


def load_plugins(plugins: Iterable[str]) -> List[ToolSpec]:
    """ imports ``module:factory`` strings; each factory returns a ToolSpec or a list """
    specs = []
    for plugin in plugins:
        module_name, _, attr = plugin.partition(":")
        if not module_name or not attr:
            raise ConfigError(f"plugin {plugin!r} must look like 'module:factory'")
        try:
            factory = getattr(importlib.import_module(module_name), attr)
        except (ImportError, AttributeError) as e:
            raise ConfigError(f"cannot load plugin {plugin!r}: {e}") from e
        out = factory()
        specs += list(out) if isinstance(out, (list, tuple)) else [out]
    return specs


IMAGE_TOOLS = {
    "BLIPTool": ("Provides genetic answers for pathology images with questions related to "
                 "gene expressions. Input: text instruction/question and image path.",
                 {"text": "string", "image_path": "string"}),
    "CLIPTool": ("OpenCLIP image-text matching tool. Strictly accepts image file paths as "
                 "input; only valid paths allowed.",
                 {"image_path": "string"}),
    "QwenVLCaptionTool": ("Provides answers for pathology images with associated "
                          "questions. Input: text instruction/question and image path.",
                          {"text": "string", "image_path": "string"}),
}
ONCOTREE_DESCRIPTION = ("Query OncoTree knowledge graph. Input: tumor, disease, or tissue "
                        "keyword. Returns upstream/downstream nodes and tissue mapping.")
ONCOTREE_SCHEMA = {"query": "string",
                   "query_type": {"type": "string", "required": False, "default": "tumor"}}
MYGENE_DESCRIPTION = ("Query gene information from MyGene.info using gene symbol or "
                      "keyword. Useful for retrieving article-correlated gene summaries.")
MYGENE_SCHEMA = {"query": "string", "top_k": {"type": "integer", "required": False,
                                              "default": 3}}


def _load_mock_file(path: str) -> Dict[str, Any]:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def builtin_tools(settings, clock=None, transport=None) -> List[ToolSpec]:
    """
    OncoTreeTool and DocumentGeneQueryTool (HTTP, replayed from ``tool_cassette`` when
    set, canned when ``offline_tools``), the offline image tools, and the mock tools of
    ``mock_tools_path``.
    """
    clock = clock or WallClock()
    mocks = _load_mock_file(settings.get("mock_tools_path", ""))
    if transport is None and settings.get("tool_cassette"):
        transport = CassetteTransport(settings["tool_cassette"], mode="replay")
    tools = []
    if settings.get("offline_tools"):
        oncotree = mock_tool({"behavior": "map", "default": "No results found."}, clock)
        mygene = mock_tool({"behavior": "map", "default": "No results found."}, clock)
    else:
        onco_client = OncoTreeClient(settings["oncotree_url"], transport=transport)
        gene_client = MyGeneClient(settings["mygene_url"], transport=transport)

        def oncotree(inp):
            return onco_client.lookup(inp["query"], inp.get("query_type") or "tumor")

        def mygene(inp):
            return gene_client.query(inp["query"], inp.get("top_k") or 3)

    tools.append(ToolSpec("OncoTreeTool", ONCOTREE_DESCRIPTION, ONCOTREE_SCHEMA, oncotree))
    tools.append(ToolSpec("DocumentGeneQueryTool", MYGENE_DESCRIPTION, MYGENE_SCHEMA, mygene))
    captions = mocks.get("captions", {})
    for name, (description, schema) in IMAGE_TOOLS.items():
        tools.append(ToolSpec(name, description, schema,
                              image_tool(name, settings.get("image_dir", ""), captions)))
    for name, spec in mocks.get("tools", {}).items():
        tools.append(ToolSpec(name, spec.get("description", f"{name} (mock)"),
                              spec.get("input_schema", {"text": "string"}),
                              mock_tool(spec, clock)))
    return tools


def build_registry(settings, clock=None, transport=None) -> ToolRegistry:
    """ every builtin tool followed by plugin tools; mock entries replace builtins by name """
    registry = ToolRegistry()
    tools = builtin_tools(settings, clock, transport) + load_plugins(settings.get("plugins", []))
    by_name = {}
    for t in tools:
        by_name[t.name] = t
    for t in by_name.values():
        registry.register(t)
    logger.debug("registry holds %s", ", ".join(registry.names))
    return registry
