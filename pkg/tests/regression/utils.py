"""Reference implementations the regression tests compare the library against. They trade
speed for directness: dense score tables, explicit loops and exact fractions."""

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from trajforge.model import AenNode, Connection, MetaTrajectory
from trajforge.synthesis import HashScorer

FINAL_ANSWER = "Final Answer"


class FixedAnswer:
    """ answerer replying with the same final answer to every prompt """

    def __init__(self, answer="ok"):
        self.answer = answer
        self.calls = 0

    def complete(self, request):
        self.calls += 1
        return f"Final Answer: {self.answer}"


def random_nodes(rng: np.random.Generator, n: int, images=(None, None, "a.png", "b.png"),
                 tools=("GeneTool", "OncoTreeTool", "BLIPTool")) -> List[AenNode]:
    return [AenNode(f"n{k}", f"question {k}", str(rng.choice(tools)), {"q": str(k)},
                    f"observation {k}", images[int(rng.integers(len(images)))])
            for k in range(n)]


def brute_force_connections(nodes: Sequence[AenNode], theta: float) -> List[Connection]:
    """ every image-compatible ordered pair scored with HashScorer, kept at score >= theta """
    scorer = HashScorer()
    kept = []
    for a in nodes:
        for b in nodes:
            if a.id == b.id:
                continue
            if a.image is not None and b.image is not None and a.image != b.image:
                continue
            s, reason = scorer.score(a, b)
            if s >= theta:
                kept.append(Connection(a.id, b.id, s, reason))
    return sorted(kept, key=lambda c: (-c.score, c.src, c.dst))


def reference_paths(nodes: Sequence[AenNode], connections: Sequence[Connection],
                    max_length: int, max_usage: int,
                    max_trajectories: int) -> List[Tuple[List[str], str]]:
    """ greedy construction on a dense score table; returns (node ids, image) per trajectory """
    ids = [node.id for node in nodes]
    pos = {i: k for k, i in enumerate(ids)}
    n = len(ids)
    score = np.full((n, n), -1.)
    for c in connections:
        score[pos[c.src], pos[c.dst]] = c.score
    usage = [0] * n
    used = set()
    out = []
    for seed in connections:
        if len(out) >= max_trajectories:
            break
        s, d = pos[seed.src], pos[seed.dst]
        if (s, d) in used or usage[s] >= max_usage or usage[d] >= max_usage:
            continue
        images = {nodes[k].image for k in (s, d)} - {None}
        if len(images) > 1:
            continue
        path = [s, d]
        while len(path) < max_length:
            best, best_score = None, -1.
            # scan by ascending id so equal scores resolve to the smaller destination id
            for j in sorted(range(n), key=lambda k: ids[k]):
                if j in path or usage[j] >= max_usage or score[path[-1], j] < 0:
                    continue
                if images and nodes[j].image not in images | {None}:
                    continue
                if score[path[-1], j] > best_score:
                    best, best_score = j, score[path[-1], j]
            if best is None or best_score == 0:
                break
            path.append(best)
            images |= {nodes[best].image} - {None}
        used.add((s, d))
        for k in path:
            usage[k] += 1
        image = next((nodes[k].image for k in path if nodes[k].image), None)
        out.append(([ids[k] for k in path], image))
    return out


def reference_cooccurrence(trajectories: Sequence[MetaTrajectory]) -> Dict[Tuple[str, str], int]:
    """ unordered adjacent tool pairs -> count, keyed by the sorted name pair """
    counts: Dict[Tuple[str, str], int] = {}
    for traj in trajectories:
        tools = [s.action for s in traj.steps if s.action != FINAL_ANSWER]
        for k in range(len(tools) - 1):
            key = tuple(sorted((tools[k], tools[k + 1])))
            counts[key] = counts.get(key, 0) + 1
    return counts


def largest_remainder(n: int, ratios: Sequence[int]) -> List[int]:
    """ Hamilton apportionment with exact quotas; ties go to the earlier part """
    quotas = [Fraction(n * r, sum(ratios)) for r in ratios]
    counts = [int(q) for q in quotas]
    left = n - sum(counts)
    ranked = sorted(range(len(ratios)), key=lambda k: (-(quotas[k] - counts[k]), k))
    for k in ranked[:left]:
        counts[k] += 1
    return counts


MARKERS = ("Thought:", "Reasoning:", "Action:", "Action Input:", "Observation:", "Final Answer:")


def count_marker_lines(text: str) -> int:
    """ lines that open a segment: a marker after optional indent, bullet and bold """
    n = 0
    for line in text.splitlines():
        line = line.lstrip(" \t")
        if line[:2] in ("- ", "* ", "+ "):
            line = line[2:].lstrip(" \t")
        line = line.replace("**", "")
        n += any(line.startswith(m) for m in MARKERS)
    return n


def byte_membership_mask(text: str, segments, offsets, channels) -> np.ndarray:
    """ per-byte channel map collapsed to tokens; a token takes its first owned byte's channel """
    data = text.encode("utf-8")
    owner = np.full(len(data), -1)
    for s in segments:
        if s.kind in channels:
            owner[s.content_span[0]:s.content_span[1]] = channels[s.kind]
    mask = np.zeros((len(offsets), 3), np.uint8)
    for t, (a, b) in enumerate(offsets):
        hit = owner[a:b][owner[a:b] >= 0]
        if hit.size:
            mask[t, hit[0]] = 1
    return mask
