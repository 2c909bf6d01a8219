"""
Copyright © 2024 trajforge developers.
"""
from .exceptions import ConfigError
from .version import version


def default_settings():
    """ default settings to run the pipeline """
    return {
        # trajforge version
        "trajforge_version": version,  # current version of trajforge used for the run

        # main settings
        "seed": 37,  # seed of the single generator used per invocation
        "log_level": "INFO",  # python logging level for library messages
        "clock": "wall",  # "wall" or "fake"; fake freezes durations at 0 for replayable outputs
        "save_path": "",  # directory for outputs, defaults to the current directory

        # completion backend
        "backend": "scripted",  # one of "scripted", "replay", "openai"
        "script_path": "",  # JSON list of scripted replies (scripted backend)
        "cassette_path": "",  # completion cassette JSONL (replay backend)
        "record_cassette": "",  # if set, record every completion of the backend here
        "base_url": "http://localhost:8000/v1",  # OpenAI-compatible endpoint root
        "model": "",  # model name sent in the chat-completion payload
        "api_key_env": "TRAJFORGE_API_KEY",  # environment variable holding the API key
        "request_timeout": 60.,  # HTTP timeout per request in seconds
        "max_in_flight": 4,  # concurrent HTTP requests allowed per backend
        "temperature": 0.,  # sampling temperature of agent, node, connection and answer requests
        "parsing_backend": "",  # "" reuses the agent backend for action-input coercion, or "openai"
        "parsing_model": "",  # model of the separate parsing backend

        # judge for answer consistency / hallucination / multiple-choice similarity
        "judge": "",  # "" (no judge), "scripted", "replay" or "openai"
        "judge_script_path": "",  # JSON list of scripted judge replies
        "judge_cassette_path": "",  # completion cassette for a replayed judge
        "judge_model": "",  # model for the HTTP judge, defaults to "model"

        # execution limits
        "max_iterations": 8,  # maximum ReACT steps per agent loop
        "tool_timeout": 300.,  # wall-clock seconds allowed per tool execution
        "max_generation": 2048,  # generation cap in tokens per completion
        "max_execution_time": 0.,  # total seconds per agent loop, 0 disables the limit

        # connection discovery
        "theta": 0.5,  # score threshold for keeping a connection
        "max_pairs": 1000,  # number of ordered pairs evaluated
        "attempts_multiplier": 10,  # sampling attempts allowed per evaluated pair
        "scorer": "llm",  # "llm" (backend judged) or "hash" (deterministic)
        "scorer_workers": 1,  # concurrent scorer calls

        # trajectory construction
        "max_length": 8,  # maximum nodes per trajectory
        "max_usage": 3,  # maximum trajectories any node may appear in
        "max_trajectories": 10000,  # stop after this many trajectories

        # filtering and splitting
        "min_nodes": 2,  # shortest trajectory kept
        "max_nodes": 8,  # longest trajectory kept
        "split": "85:5:10",  # train:validation:test ratios, must sum to 100
        "semantic_filter": False,  # also reject trajectories the judge does not accept

        # tool clustering
        "min_link": 0.1,  # normalized average co-occurrence needed to merge clusters

        # tools
        "oncotree_url": "https://oncotree.mskcc.org",  # OncoTree REST root
        "mygene_url": "https://mygene.info/v3",  # MyGene.info REST root
        "tool_cassette": "",  # HTTP cassette replayed by the OncoTree/MyGene clients
        "offline_tools": False,  # replace the HTTP tools with canned mocks
        "mock_tools_path": "",  # JSON of canned observations per mock tool
        "image_dir": "",  # directory image paths are resolved against
        "plugins": [],  # "module:factory" strings returning extra ToolSpecs

        # agents
        "agents_config": "",  # JSON binding agent templates, limits and toolsets
        "cluster_config": "",  # cluster config JSON produced by the cluster subcommand

        # evaluation
        "trr_theta": 0.7,  # input similarity threshold for redundant tool calls
    }


_CHOICES = {
    "backend": ("scripted", "replay", "openai"),
    "judge": ("", "scripted", "replay", "openai"),
    "parsing_backend": ("", "openai"),
    "scorer": ("llm", "hash"),
    "clock": ("wall", "fake"),
}

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

_POSITIVE = ("max_iterations", "tool_timeout", "max_generation", "max_pairs",
             "attempts_multiplier", "scorer_workers", "max_usage", "max_trajectories",
             "max_in_flight", "request_timeout")


def validate_settings(settings):
    """ check settings against the invariants of the types they feed

    Raises
    ------
    ConfigError
        naming the first offending key
    """
    defaults = default_settings()
    for k, v in settings.items():
        if k not in defaults:
            continue
        d = defaults[k]
        if isinstance(d, bool):
            if not isinstance(v, bool):
                raise ConfigError(f"setting '{k}' must be a boolean, got {v!r}")
        elif isinstance(d, (int, float)):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"setting '{k}' must be numeric, got {v!r}")
        elif isinstance(d, list):
            if not isinstance(v, list):
                raise ConfigError(f"setting '{k}' must be a list, got {v!r}")
        elif isinstance(d, str) and not isinstance(v, str):
            raise ConfigError(f"setting '{k}' must be a string, got {v!r}")
    for k, choices in _CHOICES.items():
        if k in settings and settings[k] not in choices:
            raise ConfigError(f"setting '{k}' must be one of {list(choices)}, got {settings[k]!r}")
    for k in _POSITIVE:
        if k in settings and settings[k] <= 0:
            raise ConfigError(f"setting '{k}' must be strictly positive, got {settings[k]!r}")
    if not 0. <= settings.get("theta", 0.5) <= 1.:
        raise ConfigError(f"setting 'theta' must lie in [0, 1], got {settings['theta']!r}")
    if settings.get("max_length", 8) < 2:
        raise ConfigError("setting 'max_length' must be at least 2")
    if settings.get("min_nodes", 2) > settings.get("max_nodes", 8):
        raise ConfigError("setting 'min_nodes' exceeds 'max_nodes'")
    if str(settings.get("log_level", "INFO")).upper() not in _LOG_LEVELS:
        raise ConfigError(f"setting 'log_level' must be one of {list(_LOG_LEVELS)}, got {settings['log_level']!r}")
    if settings.get("max_execution_time", 0.) < 0:
        raise ConfigError("setting 'max_execution_time' must be non-negative")
    if not 0. <= settings.get("temperature", 0.) <= 2.:
        raise ConfigError(f"setting 'temperature' must lie in [0, 2], got {settings['temperature']!r}")
    if "split" in settings:
        ratios = parse_split(settings["split"])
        if sum(ratios) != 100 or min(ratios) < 0:
            raise ConfigError(f"setting 'split' ratios must be non-negative and sum to 100, got {settings['split']!r}")
    return settings


def parse_split(split):
    """ "85:5:10" -> (85, 5, 10) """
    if isinstance(split, (list, tuple)):
        parts = list(split)
    else:
        parts = str(split).split(":")
    try:
        ratios = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"setting 'split' must look like 85:5:10, got {split!r}")
    if len(ratios) != 3:
        raise ConfigError(f"setting 'split' needs three ratios, got {split!r}")
    return ratios
