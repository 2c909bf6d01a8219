"""
Copyright © 2024 trajforge developers.

Local stand-ins for tools: canned behaviours and the image-tool mocks used offline.
"""
import json
import os
from typing import Any, Callable, Dict, Mapping, Optional

from .clock import WallClock

Executor = Callable[[Dict[str, Any]], str]


def input_key(structured_input: Mapping[str, Any]) -> str:
    """Canonical JSON of a tool input, the key of canned responses."""
    return json.dumps(dict(structured_input), sort_keys=True, ensure_ascii=False)


def mock_tool(spec: Mapping[str, Any], clock=None) -> Executor:
    """
    Builds an executor from a canned behaviour.

    Parameters
    ----------
    spec : dict
        ``behavior`` is one of

        - ``"echo"``: returns the value of ``field`` (default ``"text"``)
        - ``"map"``: looks up ``responses`` by canonical input JSON, or by the value of
          the only input field, falling back to ``default``
        - ``"fixed"``: always returns ``observation``
        - ``"error"``: raises ``RuntimeError(message)``

        ``delay`` (seconds) is slept on ``clock`` before any behaviour runs.
    clock : WallClock or FakeClock

    Returns
    -------
    executor : callable taking the structured input and returning observation text
    """
    clock = clock or WallClock()
    behavior = spec.get("behavior", "fixed")
    delay = float(spec.get("delay", 0.))
    if behavior not in ("echo", "map", "fixed", "error"):
        raise ValueError(f"unknown mock behavior {behavior!r}")

    def run(structured_input: Dict[str, Any]) -> str:
        if delay > 0:
            clock.sleep(delay)
        if behavior == "echo":
            return str(structured_input.get(spec.get("field", "text"), ""))
        if behavior == "error":
            raise RuntimeError(spec.get("message", "mock failure"))
        if behavior == "fixed":
            return spec.get("observation", "")
        responses = spec.get("responses", {})
        key = input_key(structured_input)
        if key in responses:
            return responses[key]
        if len(structured_input) == 1:
            value = str(next(iter(structured_input.values())))
            if value in responses:
                return responses[value]
        return spec.get("default", "No results found.")

    return run


def image_tool(name: str, image_dir: str = "", captions: Optional[Mapping[str, str]] = None,
               path_field: str = "image_path") -> Executor:
    """
    Offline pathology image tool: checks the referenced image exists and returns the
    canned caption for its file name.
    """
    captions = captions or {}

    def run(structured_input: Dict[str, Any]) -> str:
        path = str(structured_input.get(path_field, ""))
        full = path if os.path.isabs(path) or not image_dir else os.path.join(image_dir, path)
        if not path or not os.path.isfile(full):
            raise FileNotFoundError(f"Image file does not exist: {path}")
        base = os.path.basename(path)
        return captions.get(base, f"{name} found no salient findings for {base}.")

    return run
