"""
Copyright © 2024 trajforge developers.
"""
from typing import Optional

from ..exceptions import ConfigError
from .base import Backend
from .openai_http import OpenAICompatibleBackend
from .scripted import Cassette, RecordingBackend, ReplayBackend, ScriptedBackend


def make_backend(settings, transport=None) -> Backend:
    """ completion backend shared by the planner, components, scorer and answerer """
    name = settings["backend"]
    if name == "scripted":
        backend = ScriptedBackend.from_file(settings["script_path"])
    elif name == "replay":
        if not settings["cassette_path"]:
            raise ConfigError("setting 'cassette_path' is required by the replay backend")
        backend = ReplayBackend(Cassette.load(settings["cassette_path"]))
    elif name == "openai":
        backend = OpenAICompatibleBackend.from_settings(settings, transport=transport)
    else:
        raise ConfigError(f"setting 'backend' has unknown value {name!r}")
    if settings.get("record_cassette"):
        backend = RecordingBackend(backend, settings["record_cassette"])
    return backend


def make_judge(settings, transport=None) -> Optional[Backend]:
    name = settings["judge"]
    if not name:
        return None
    if name == "scripted":
        return ScriptedBackend.from_file(settings["judge_script_path"], name="judge")
    if name == "replay":
        if not settings["judge_cassette_path"]:
            raise ConfigError("setting 'judge_cassette_path' is required by the replay judge")
        return ReplayBackend(Cassette.load(settings["judge_cassette_path"]))
    if name == "openai":
        return OpenAICompatibleBackend.from_settings(
            settings, model=settings["judge_model"] or settings["model"], transport=transport)
    raise ConfigError(f"setting 'judge' has unknown value {name!r}")


def make_parsing_assistant(settings, agent_backend: Backend, transport=None) -> Backend:
    if settings["parsing_backend"] == "openai":
        return OpenAICompatibleBackend.from_settings(
            settings, model=settings["parsing_model"] or settings["model"], transport=transport)
    return agent_backend
