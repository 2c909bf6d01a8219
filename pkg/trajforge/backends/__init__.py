"""
Copyright © 2024 trajforge developers.
"""
from .base import CompletionRequest, Backend, complete, fingerprint, MAX_GENERATION
from .scripted import ScriptedBackend, Cassette, CassetteEntry, ReplayBackend, RecordingBackend
from .openai_http import OpenAICompatibleBackend
from .cassette import CassetteTransport
from .oncotree import OncoTreeClient
from .mygene import MyGeneClient
from .mock import mock_tool, image_tool
from .clock import WallClock, FakeClock, make_clock
from .factory import make_backend, make_judge, make_parsing_assistant
