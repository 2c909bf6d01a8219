"""
Copyright © 2024 trajforge developers.

Node connection discovery: scores sampled ordered node pairs and keeps those above a
threshold.
"""
import hashlib
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..backends.base import CompletionRequest, complete
from ..exceptions import InsufficientNodes
from ..model.trajectory import AenNode, Connection, action_input_text

try:
    from typing import Protocol
except ImportError:  # python < 3.8
    from typing_extensions import Protocol

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConnectionParams:
    theta: float = 0.5
    max_pairs: int = 1000
    attempts_multiplier: int = 10
    seed: int = 37

    def __post_init__(self):
        # theta above 1 is accepted and admits nothing
        if not self.theta >= 0.:
            raise ValueError(f"theta must be non-negative, got {self.theta}")
        if self.max_pairs < 1 or self.attempts_multiplier < 1:
            raise ValueError("max_pairs and attempts_multiplier must be >= 1")

    @classmethod
    def from_settings(cls, settings):
        return cls(settings["theta"], settings["max_pairs"], settings["attempts_multiplier"],
                   settings["seed"])


class PairScorer(Protocol):
    def score(self, a: AenNode, b: AenNode) -> Tuple[float, str]:
        ...


def image_compatible(a: AenNode, b: AenNode) -> bool:
    """ same image, or at least one side without an image """
    return a.image is None or b.image is None or a.image == b.image


class HashScorer:
    """ deterministic pseudo-random score from the two node ids """

    def score(self, a: AenNode, b: AenNode) -> Tuple[float, str]:
        digest = hashlib.sha256(f"{a.id}->{b.id}".encode("utf-8")).digest()
        s = int.from_bytes(digest[:8], "big") / float(2 ** 64)
        return s, f"{b.action} continues the evidence gathered by {a.action}."


CONNECTION_PROMPT = """You judge whether two verified tool interactions form a coherent reasoning chain.

Interaction A
Question: {query_a}
Action: {action_a}
Action Input: {input_a}
Observation: {observation_a}

Interaction B
Question: {query_b}
Action: {action_b}
Action Input: {input_b}
Observation: {observation_b}

Would an agent that just observed A sensibly call B next? Rate the logical connection
between 0 and 1 and explain the step from A to B as the agent's thought.

Score: <number between 0 and 1>
Reasoning: <the thought leading from A to B>"""

_SCORE = re.compile(r"Score\s*:\s*\**\s*([-+]?\d*\.?\d+)", re.IGNORECASE)
_REASONING = re.compile(r"Reasoning\s*:\s*\**\s*(.*)", re.IGNORECASE | re.DOTALL)


class LLMConnectionScorer:
    """ asks the backend for ``Score:`` and ``Reasoning:`` lines """

    def __init__(self, backend, max_tokens: int = 2048, temperature: float = 0.):
        self.backend = backend
        self.max_tokens = max_tokens
        self.temperature = temperature

    def score(self, a: AenNode, b: AenNode) -> Tuple[float, str]:
        prompt = CONNECTION_PROMPT.format(
            query_a=a.query, action_a=a.action, input_a=action_input_text(a.action_input),
            observation_a=a.observation, query_b=b.query, action_b=b.action,
            input_b=action_input_text(b.action_input), observation_b=b.observation)
        images = [i for i in {a.image, b.image} if i]
        request = CompletionRequest.for_prompt(prompt, sorted(images),
                                               max_tokens=self.max_tokens,
                                               temperature=self.temperature)
        reply = complete(request, self.backend, self.max_tokens)
        return parse_connection_reply(reply)


def parse_connection_reply(reply: str) -> Tuple[float, str]:
    """ (score clamped to [0, 1], reasoning); an unreadable score counts as 0 """
    m = _SCORE.search(reply)
    if m is None:
        logger.warning("connection reply without a score: %r", reply[:200])
        score = 0.
    else:
        score = min(max(float(m.group(1)), 0.), 1.)
    r = _REASONING.search(reply)
    reasoning = r.group(1).strip() if r else reply.strip()
    return score, reasoning


def sample_pairs(n: int, compatible, params: ConnectionParams,
                 stats: Optional[Dict] = None) -> List[Tuple[int, int]]:
    """
    Ordered index pairs to score, without replacement. Sampling stops at ``max_pairs``
    compatible pairs or ``attempts_multiplier * max_pairs`` draws; when ``max_pairs``
    covers every ordered pair they are enumerated instead.
    """
    if params.max_pairs >= n * (n - 1):
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j and compatible(i, j)]
        attempts = n * (n - 1)
    else:
        rng = np.random.default_rng(params.seed)
        seen = set()
        pairs = []
        attempts = 0
        cap = params.attempts_multiplier * params.max_pairs
        while len(pairs) < params.max_pairs and attempts < cap:
            attempts += 1
            i = int(rng.integers(n))
            j = int(rng.integers(n - 1))
            j += j >= i
            if (i, j) in seen:
                continue
            seen.add((i, j))
            if compatible(i, j):
                pairs.append((i, j))
    if stats is not None:
        stats["attempts"] = attempts
        stats["pairs_evaluated"] = len(pairs)
    return pairs


def discover_connections(nodes: Sequence[AenNode], params: ConnectionParams,
                         scorer: PairScorer, max_workers: int = 1,
                         stats: Optional[Dict] = None) -> List[Connection]:
    """
    Scores sampled ordered pairs of image-compatible nodes and keeps those with
    score >= theta.

    Parameters
    ----------
    nodes : sequence of AenNode, unique ids
    params : ConnectionParams
    scorer : object with ``score(a, b) -> (score, reasoning)``
    max_workers : int
        concurrent scorer calls; results are merged in sampling order
    stats : dict, optional
        receives ``pairs_evaluated`` and ``attempts``

    Returns
    -------
    connections : list of Connection
        sorted by score descending, then (src, dst) ascending
    """
    n = len(nodes)
    if n < 2:
        raise InsufficientNodes(f"connection discovery needs at least 2 nodes, got {n}")
    ids = [node.id for node in nodes]
    if len(set(ids)) != n:
        raise ValueError("node ids must be unique")
    pairs = sample_pairs(n, lambda i, j: image_compatible(nodes[i], nodes[j]), params, stats)

    def score(pair):
        return scorer.score(nodes[pair[0]], nodes[pair[1]])

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            scores = list(pool.map(score, pairs))
    else:
        scores = [score(p) for p in pairs]

    kept = [Connection(ids[i], ids[j], float(s), r)
            for (i, j), (s, r) in zip(pairs, scores) if s >= params.theta]
    kept.sort(key=lambda c: (-c.score, c.src, c.dst))
    logger.info("%d of %d evaluated pairs kept at theta=%g", len(kept), len(pairs),
                params.theta)
    return kept
