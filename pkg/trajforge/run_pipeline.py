"""
Copyright © 2024 trajforge developers.

Pipeline stages behind the command line: node generation, connection discovery,
trajectory synthesis, agent runs, evaluation, tool clustering and transcript parsing.
"""
import json
import logging
import os
import sys
import time
from functools import partial
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from tqdm import tqdm

from .default_settings import default_settings
from .agents import (AgentConfig, ComponentLifecycle, build_registry, default_components,
                     load_components, run_planner)
from .backends import make_backend, make_clock, make_judge, make_parsing_assistant
from .clustering import cluster_tools, count_cooccurrence, save_cluster_config
from .exceptions import ActionParseError, ConfigError, EmptyResult
from .metrics import evaluate_dataset
from .model import ID_SEPARATOR, AenNode, Connection, MetaTrajectory, RunRecord, save_jsonl
from .parsing import parse_transcript, segments_to_steps
from .synthesis import (ConnectionParams, ConstructionParams, HashScorer, LLMConnectionScorer,
                        construct_trajectories, discover_connections, filter_trajectories,
                        generate_aen, judge_filter, split_dataset)

print = partial(print, file=sys.stderr, flush=True)

logger = logging.getLogger(__name__)

REPORT_SETTINGS = ("seed", "theta", "max_pairs", "attempts_multiplier", "scorer", "max_length",
                   "max_usage", "max_trajectories", "min_nodes", "max_nodes", "split",
                   "temperature")


class Query(NamedTuple):
    query: str
    image: Optional[str] = None
    sample_id: Optional[str] = None


def load_queries(filename) -> List[Query]:
    """ one query per line, either plain text or a JSON object with ``query`` and
    optional ``image`` / ``sample_id`` """
    queries = []
    with open(filename, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("{"):
                try:
                    d = json.loads(line)
                    queries.append(Query(d["query"], d.get("image"), d.get("sample_id")))
                except (ValueError, KeyError) as e:
                    raise ConfigError(f"{filename}, line {line_no}: bad query record {e}")
            else:
                queries.append(Query(line))
    return queries


def output_path(settings, filename: str) -> str:
    return os.path.join(settings.get("save_path") or ".", filename)


def generate_nodes(settings, queries: Sequence[Query], backend=None, registry=None,
                   clock=None) -> List[AenNode]:
    """ one node per query; queries the backend cannot turn into a tool call are skipped """
    if not queries:
        return []
    for k, q in enumerate(queries):
        if q.sample_id and ID_SEPARATOR in q.sample_id:
            raise ConfigError(f"query {k}: sample_id {q.sample_id!r} becomes a node id and must "
                              f"not contain {ID_SEPARATOR!r}")
    clock = clock or make_clock(settings["clock"])
    backend = backend if backend is not None else make_backend(settings)
    registry = registry if registry is not None else build_registry(settings, clock)
    assistant = make_parsing_assistant(settings, backend)
    nodes, failures = [], 0
    for k, q in enumerate(tqdm(queries, desc="nodes", file=sys.stderr, disable=None)):
        try:
            nodes.append(generate_aen(q.query, backend, registry, q.image,
                                      node_id=q.sample_id or str(k), assistant=assistant,
                                      tool_timeout=settings["tool_timeout"], clock=clock,
                                      max_tokens=settings["max_generation"],
                                      temperature=settings["temperature"]))
        except ActionParseError as e:
            failures += 1
            logger.warning("query %d produced no node: %s", k, e)
    print(f"{len(nodes)} nodes generated, {failures} failures")
    return nodes


def make_scorer(settings, backend):
    if settings["scorer"] == "hash":
        return HashScorer()
    return LLMConnectionScorer(backend, settings["max_generation"], settings["temperature"])


def connect_nodes(settings, nodes: Sequence[AenNode],
                  backend=None) -> Tuple[List[Connection], Dict]:
    if settings["scorer"] == "llm" and backend is None:
        backend = make_backend(settings)
    stats = {}
    connections = discover_connections(nodes, ConnectionParams.from_settings(settings),
                                       make_scorer(settings, backend),
                                       max_workers=settings["scorer_workers"], stats=stats)
    return connections, stats


def synthesize(settings, nodes: Sequence[AenNode], backend=None, judge=None):
    """
    discover -> construct -> filter -> split, writing ``connections.jsonl``,
    ``trajectories.jsonl``, ``train.jsonl``, ``validation.jsonl``, ``test.jsonl`` and
    ``report.json`` under ``save_path``

    Returns
    -------
    report : dict
        {"nodes_in", "pairs_evaluated", "connections_kept", "trajectories",
        "rejections", ...}

    Raises
    ------
    EmptyResult
        no trajectory survived filtering (the report is written first)
    """
    timing = {}
    t0 = time.time()
    backend = backend if backend is not None else make_backend(settings)
    if judge is None and settings["semantic_filter"]:
        judge = make_judge(settings)
        if judge is None:
            raise ConfigError("setting 'semantic_filter' needs a configured 'judge'")

    t11 = time.time()
    print("----------- CONNECTIONS")
    connections, stats = connect_nodes(settings, nodes, backend)
    save_jsonl(output_path(settings, "connections.jsonl"), connections)
    timing["connections"] = time.time() - t11
    print("----------- Total %0.2f sec" % timing["connections"])

    t11 = time.time()
    print("----------- TRAJECTORIES")
    skipped = []
    trajectories = construct_trajectories(nodes, connections,
                                          ConstructionParams.from_settings(settings), backend,
                                          skip_report=skipped,
                                          max_tokens=settings["max_generation"],
                                          temperature=settings["temperature"])
    kept, rejections = filter_trajectories(
        trajectories, settings["min_nodes"], settings["max_nodes"],
        judge_filter(judge) if settings["semantic_filter"] else None)
    timing["trajectories"] = time.time() - t11
    print("----------- Total %0.2f sec" % timing["trajectories"])

    report = {"nodes_in": len(nodes), "pairs_evaluated": stats.get("pairs_evaluated", 0),
              "connections_kept": len(connections), "trajectories": len(kept),
              "rejections": skipped + rejections,
              "settings": {k: settings[k] for k in REPORT_SETTINGS}}
    if kept:
        train, validation, test = split_dataset(kept, settings["split"], settings["seed"])
        save_jsonl(output_path(settings, "trajectories.jsonl"), kept)
        for name, part in (("train", train), ("validation", validation), ("test", test)):
            save_jsonl(output_path(settings, f"{name}.jsonl"), part)
        report["splits"] = {"train": len(train), "validation": len(validation),
                            "test": len(test)}
    with open(output_path(settings, "report.json"), "w") as f:
        json.dump(report, f, indent=2)
    timing["total"] = time.time() - t0
    print("----------- Total %0.2f sec" % timing["total"])
    if not kept:
        raise EmptyResult(f"no trajectory survived filtering ({len(trajectories)} built, "
                          f"{len(connections)} connections)")
    return report


def run_queries(settings, queries: Sequence[Query], backend=None, registry=None,
                clock=None) -> List[RunRecord]:
    clock = clock or make_clock(settings["clock"])
    backend = backend if backend is not None else make_backend(settings)
    registry = registry if registry is not None else build_registry(settings, clock)
    config = AgentConfig.from_settings(settings)
    if settings["cluster_config"]:
        components = load_components(settings["cluster_config"])
    else:
        components = default_components(registry.names)
    for c in components:
        missing = [t for t in c.tools if t not in registry]
        if missing:
            raise ConfigError(f"component {c.agent_name} names unregistered tools {missing}")
    assistant = make_parsing_assistant(settings, backend)
    records = []
    for q in tqdm(queries, desc="runs", file=sys.stderr, disable=None):
        records.append(run_planner(q.query, q.image, backend, components, registry,
                                   config=config, assistant=assistant, clock=clock,
                                   lifecycle=ComponentLifecycle(), sample_id=q.sample_id))
    return records


def evaluate(settings, runs: Sequence[RunRecord],
             ground_truth: Optional[Sequence[MetaTrajectory]] = None, judge=None):
    judge = judge if judge is not None else make_judge(settings)
    return evaluate_dataset(runs, ground_truth, judge, trr_theta=settings["trr_theta"],
                            max_workers=settings["max_in_flight"])


def cluster(settings, trajectories: Sequence[MetaTrajectory], filename: str):
    matrix = count_cooccurrence(trajectories)
    clusters = cluster_tools(matrix, settings["min_link"])
    return save_cluster_config(filename, clusters)


def parse(text: str) -> Dict:
    """ transcript -> {"segments", "steps", "final_answer"} """
    segments = parse_transcript(text)
    steps, answer = segments_to_steps(segments)
    return {"segments": [{"kind": s.kind, "span": list(s.span), "content": s.content}
                         for s in segments],
            "steps": [s.to_dict() for s in steps],
            "final_answer": answer}


def settings_with_defaults(settings: Optional[Dict] = None) -> Dict:
    return {**default_settings(), **(settings or {})}
