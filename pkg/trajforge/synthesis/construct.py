"""
Copyright © 2024 trajforge developers.

Greedy trajectory construction over scored node connections.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from ..backends.base import CompletionRequest, complete
from ..exceptions import BackendError
from ..model.trajectory import ID_SEPARATOR, AenNode, Connection, MetaTrajectory, TrajectoryStep
from ..parsing.react import final_answer, parse_transcript, render_steps

logger = logging.getLogger(__name__)

FINAL_ANSWER_PROMPT = "Question: {query}\n\n{steps}\n\nNow provide the Final Answer to the original query."


@dataclass(frozen=True)
class ConstructionParams:
    max_length: int = 8
    max_usage: int = 3
    max_trajectories: int = 10000

    def __post_init__(self):
        if self.max_length < 2:
            raise ValueError(f"max_length must be >= 2, got {self.max_length}")
        if self.max_usage < 1 or self.max_trajectories < 1:
            raise ValueError("max_usage and max_trajectories must be >= 1")

    @classmethod
    def from_settings(cls, settings):
        return cls(settings["max_length"], settings["max_usage"], settings["max_trajectories"])


def build_steps(path: Sequence[AenNode], reasons: Sequence[Optional[str]]) -> List[TrajectoryStep]:
    """
    One step per node. The first node's thought is its own reasoning (or its query);
    every later node is reached through the reasoning of the connection leading to it.
    """
    annotated = [node.annotate(step, reason) for step, (node, reason)
                 in enumerate(zip(path, reasons))]
    steps = []
    for k, node in enumerate(annotated):
        thought = node.reasoning if k > 0 else (path[0].reasoning or path[0].query)
        steps.append(TrajectoryStep(k + 1, thought or "", node.action, node.action_input,
                                    node.observation))
    return steps


def synthesize_answer(query: str, steps: Sequence[TrajectoryStep], answerer,
                      image: Optional[str] = None, max_tokens: int = 2048,
                      temperature: float = 0.) -> str:
    prompt = FINAL_ANSWER_PROMPT.format(query=query, steps=render_steps(steps))
    request = CompletionRequest.for_prompt(prompt, [image] if image else [],
                                           max_tokens=max_tokens, temperature=temperature)
    reply = complete(request, answerer, max_tokens)
    answer = final_answer(parse_transcript(reply))
    return answer if answer is not None else reply.strip()


def _same_image(image: Optional[str], node: AenNode) -> bool:
    """ a trajectory is grounded on at most one image """
    return image is None or node.image is None or node.image == image


def construct_trajectories(nodes: Sequence[AenNode], connections: Sequence[Connection],
                           params: ConstructionParams, answerer,
                           skip_report: Optional[List[Dict]] = None,
                           max_tokens: int = 2048,
                           temperature: float = 0.) -> List[MetaTrajectory]:
    """
    Builds trajectories by seeding from each connection in descending score order and
    extending greedily from the current endpoint.

    Parameters
    ----------
    nodes : sequence of AenNode
    connections : sequence of Connection
        sorted as returned by ``discover_connections``
    params : ConstructionParams
        maximum nodes per trajectory, trajectories per node, and trajectories overall
    answerer : completion backend producing each trajectory's final answer
    skip_report : list, optional
        receives ``{"sample_id", "reason"}`` for every trajectory dropped because the
        answerer failed

    Returns
    -------
    trajectories : list of MetaTrajectory
        sample ids join the node ids with "_"
    """
    by_id = {node.id: node for node in nodes}
    for c in connections:
        if c.src not in by_id or c.dst not in by_id:
            raise ValueError(f"connection {c.src}->{c.dst} references an unknown node")
    outgoing: Dict[str, List[Connection]] = defaultdict(list)
    for c in connections:
        outgoing[c.src].append(c)

    usage: Dict[str, int] = defaultdict(int)
    used_pairs = set()
    trajectories: List[MetaTrajectory] = []
    for seed in connections:
        if len(trajectories) >= params.max_trajectories:
            break
        if (seed.src, seed.dst) in used_pairs or usage[seed.src] >= params.max_usage \
                or usage[seed.dst] >= params.max_usage:
            continue
        if not _same_image(by_id[seed.src].image, by_id[seed.dst]):
            continue
        path = [seed.src, seed.dst]
        reasons = [None, seed.reasoning]
        image = by_id[seed.src].image or by_id[seed.dst].image
        while len(path) < params.max_length:
            candidate = next((c for c in outgoing[path[-1]]
                              if c.dst not in path and usage[c.dst] < params.max_usage
                              and _same_image(image, by_id[c.dst])), None)
            if candidate is None or candidate.score == 0:
                break
            path.append(candidate.dst)
            reasons.append(candidate.reasoning)
            image = image or by_id[candidate.dst].image

        path_nodes = [by_id[i] for i in path]
        sample_id = ID_SEPARATOR.join(path)
        steps = build_steps(path_nodes, reasons)
        try:
            answer = synthesize_answer(path_nodes[0].query, steps, answerer, image, max_tokens,
                                       temperature)
        except BackendError as e:
            logger.warning("trajectory %s skipped: %s", sample_id, e)
            if skip_report is not None:
                skip_report.append({"sample_id": sample_id, "reason": str(e)})
            continue
        used_pairs.add((seed.src, seed.dst))
        for i in path:
            usage[i] += 1
        trajectories.append(MetaTrajectory(sample_id, image, tuple(steps), answer))
    return trajectories


def trajectory_quality(trajectory: MetaTrajectory, connections: Sequence[Connection]) -> float:
    """ sum of connection scores along consecutive node ids (missing edges count 0) """
    scores = {(c.src, c.dst): c.score for c in connections}
    ids = trajectory.node_ids
    return float(sum(scores.get((a, b), 0.) for a, b in zip(ids[:-1], ids[1:])))
