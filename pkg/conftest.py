import pytest
import trajforge
from pathlib import Path

from trajforge.agents import ToolRegistry, ToolSpec
from trajforge.backends import FakeClock, ScriptedBackend, mock_tool


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: larger scaling runs, deselect with -m \"not slow\"")


@pytest.fixture()
def data_dir():
    """
    Directory of the checked-in test inputs: transcripts, cassettes and fixtures.
    """
    return Path(__file__).parent.joinpath("tests", "data")


@pytest.fixture()
def test_settings(tmpdir, data_dir):
    """Initializes settings to be used for tests. Also, uses tmpdir fixture to create a unique temporary dir for each test."""
    return initialize_settings(tmpdir, data_dir)


def initialize_settings(tmpdir, data_dir):
    """Initializes settings. Used for both the test_settings fixture and for scripts that run outside pytest."""
    settings = trajforge.default_settings()
    settings.update(
        {
            "save_path": str(tmpdir),
            "clock": "fake",
            "offline_tools": True,
            "image_dir": str(Path(data_dir).joinpath("images")),
            "tool_timeout": 300.,
        }
    )
    return settings


@pytest.fixture()
def fake_clock():
    return FakeClock()


@pytest.fixture()
def scripted_backend():
    """ factory: scripted_backend(["Final Answer: ok"]) """
    def make(replies, name="scripted"):
        return ScriptedBackend(list(replies), name=name)
    return make


GENE_RESPONSES = {
    "BRCA1": "1. Gene entry: BRCA1 DNA repair associated (Entrez ID: 672, Correlation Score: 138.2)\n"
             "Summary: tumor suppressor involved in homologous recombination.",
    "ERBB2": "1. Gene entry: erb-b2 receptor tyrosine kinase 2 (Entrez ID: 2064, Correlation Score: 141.54207)\n"
             "Summary: member of the epidermal growth factor receptor family.",
}


def mock_tools(clock):
    """ echo, keyed-map, slow and failing tools """
    return [
        ToolSpec("EchoTool", "Repeats the text it receives.", {"text": "string"},
                 mock_tool({"behavior": "echo"}, clock)),
        ToolSpec("GeneTool", "Looks up a gene symbol.", {"gene": "string"},
                 mock_tool({"behavior": "map", "responses": GENE_RESPONSES,
                            "default": "No results found."}, clock)),
        ToolSpec("SlowTool", "Takes 400 seconds to answer.", {"text": "string"},
                 mock_tool({"behavior": "fixed", "observation": "late", "delay": 400.}, clock)),
        ToolSpec("FailTool", "Always fails.", {"text": "string"},
                 mock_tool({"behavior": "error", "message": "service unavailable"}, clock)),
    ]


@pytest.fixture()
def mock_registry(fake_clock):
    return ToolRegistry(mock_tools(fake_clock))
