"""
Copyright © 2024 trajforge developers.

Two-stage coercion of a free-text Action Input into a tool's input schema: a direct JSON
parse, then a parsing assistant asked to fill the schema without adding information.
"""
import json
import logging
import re
from functools import lru_cache
from typing import Any, Dict, Mapping, Optional, Tuple, Type

from pydantic import BaseModel, ValidationError, create_model

from ..backends.base import CompletionRequest, complete
from ..exceptions import AssistantUnavailable

logger = logging.getLogger(__name__)

PARSING_TEMPLATE = (
    "Do not interpret, or infer new information from the input. You are not allowed to "
    "add extra information.\n"
    "You must only fill the fields according to the schema below.\n\n"
    "=== SCHEMA ===\n{schema_json}\n\n"
    "=== INPUT ===\n{raw_input}\n\n"
    "Now return the JSON object:"
)

PRIMITIVES = {"string": str, "integer": int, "number": float, "boolean": bool}
_FENCE = re.compile(r"^```[A-Za-z]*\s*|\s*```$")


def _field(spec) -> Tuple[type, Any]:
    if isinstance(spec, str):
        spec = {"type": spec}
    kind = spec.get("type", "string")
    if kind not in PRIMITIVES:
        raise ValueError(f"unsupported field type {kind!r}, use one of {list(PRIMITIVES)}")
    tp = PRIMITIVES[kind]
    if spec.get("required", True):
        return tp, ...
    return Optional[tp], spec.get("default")


@lru_cache(maxsize=256)
def _cached_model(name: str, frozen_schema: str) -> Type[BaseModel]:
    schema = json.loads(frozen_schema)
    fields = {k: _field(v) for k, v in schema.items()}
    return create_model(name, **fields)


def schema_model(tool_name: str, input_schema: Mapping[str, Any]) -> Type[BaseModel]:
    """
    pydantic model named ``<tool_name>Input`` for a schema of the form
    ``{"gene": "string"}`` or ``{"radius": {"type": "integer", "required": false}}``.
    """
    name = re.sub(r"\W", "", tool_name) or "Tool"
    return _cached_model(f"{name}Input", json.dumps(dict(input_schema), sort_keys=True))


def first_json_object(text: str) -> Optional[Dict[str, Any]]:
    """First decodable JSON object embedded in ``text``."""
    decoder = json.JSONDecoder()
    for m in re.finditer(r"\{", text):
        try:
            obj, _ = decoder.raw_decode(text, m.start())
        except ValueError:
            continue
        if isinstance(obj, dict):
            return obj
    return None


def _direct(raw: str) -> Optional[Dict[str, Any]]:
    try:
        obj = json.loads(_FENCE.sub("", raw.strip()))
    except ValueError:
        return None
    return obj if isinstance(obj, dict) else None


def coerce_action_input(raw: str, schema: Type[BaseModel], assistant=None,
                        max_tokens: int = 2048) -> Dict[str, Any]:
    """
    Coerces ``raw`` into ``schema``.

    Parameters
    ----------
    raw : str
        Action Input text
    schema : pydantic model class (see ``schema_model``)
    assistant : backend, optional
        asked with ``PARSING_TEMPLATE`` when the direct parse fails

    Returns
    -------
    structured : dict
        validated field values

    Raises
    ------
    pydantic.ValidationError
        the input (or the assistant's reply) does not satisfy the schema
    AssistantUnavailable
        ``raw`` is not a JSON object and no assistant is configured
    """
    direct = _direct(raw)
    if direct is not None:
        try:
            return schema.model_validate(direct).model_dump()
        except ValidationError:
            if assistant is None:
                raise
            logger.debug("direct parse of %r failed validation, asking the assistant", raw)
    elif assistant is None:
        raise AssistantUnavailable(
            f"Action Input is not a JSON object for {schema.__name__} and no parsing "
            f"assistant is configured")

    prompt = PARSING_TEMPLATE.format(
        schema_json=json.dumps(schema.model_json_schema(), ensure_ascii=False),
        raw_input=raw)
    reply = complete(CompletionRequest.for_prompt(prompt, max_tokens=max_tokens), assistant)
    obj = first_json_object(reply)
    if obj is None:
        raise ValueError(f"parsing assistant returned no JSON object: {reply[:200]!r}")
    return schema.model_validate(obj).model_dump()
