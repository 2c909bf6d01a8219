"""
Copyright © 2024 trajforge developers.

Monte Carlo checks of how the admitted connection set behaves as the node pool grows.
"""
from typing import Callable, List, NamedTuple, Sequence

import numpy as np
from numba import njit

Sampler = Callable[[np.random.Generator, tuple], np.ndarray]


class ProbePoint(NamedTuple):
    n: int
    pairs: int
    mean_max: float
    stderr: float
    mean_reachable_length: float
    mean_path_score: float


def uniform_sampler(rng: np.random.Generator, shape: tuple) -> np.ndarray:
    return rng.random(shape)


def constant_sampler(value: float) -> Sampler:
    if not 0. <= value <= 1.:
        raise ValueError(f"constant score must lie in [0, 1], got {value}")

    def sample(rng, shape):
        return np.full(shape, value)

    return sample


@njit(cache=True)
def greedy_walk(scores, theta, max_length):
    """ greedy path from the best admitted pair; returns (length, summed edge score) """
    n = scores.shape[0]
    best, src, dst = -1., -1, -1
    for i in range(n):
        for j in range(n):
            if i != j and scores[i, j] >= theta and scores[i, j] > best:
                best, src, dst = scores[i, j], i, j
    if src < 0:
        return 0, 0.
    visited = np.zeros(n, np.bool_)
    visited[src] = True
    visited[dst] = True
    length, total, cur = 2, best, dst
    while length < max_length:
        nxt, s = -1, -1.
        for j in range(n):
            if not visited[j] and scores[cur, j] >= theta and scores[cur, j] > s:
                nxt, s = j, scores[cur, j]
        if nxt < 0 or s == 0.:
            break
        visited[nxt] = True
        total += s
        cur = nxt
        length += 1
    return length, total


def scalability_probe(n_values: Sequence[int], sampler: Sampler = uniform_sampler,
                      trials: int = 200, seed: int = 37, theta: float = 0.,
                      max_length: int = 8) -> List[ProbePoint]:
    """
    For each pool size n, draws i.i.d. scores for all n(n-1) ordered pairs ``trials``
    times and estimates the expected maximum admitted score, with the length and summed
    score of the greedy path seeded at that maximum.

    Parameters
    ----------
    n_values : sequence of int
        pool sizes, each >= 2
    sampler : callable ``(rng, shape) -> scores in [0, 1]``
    trials : int
    seed : int
        one generator drives every n in order
    theta : float
        admission threshold; trials admitting nothing count a maximum of 0

    Returns
    -------
    points : list of ProbePoint
        one per n, in input order
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    points = []
    for n in n_values:
        if n < 2:
            raise ValueError(f"pool size must be >= 2, got {n}")
        maxima = np.zeros(trials)
        lengths = np.zeros(trials)
        path_scores = np.zeros(trials)
        off_diag = ~np.eye(n, dtype=bool)
        for t in range(trials):
            scores = np.asarray(sampler(rng, (n, n)), dtype=np.float64)
            scores[~off_diag] = -1.
            admitted = scores[off_diag & (scores >= theta)]
            maxima[t] = admitted.max() if admitted.size else 0.
            lengths[t], path_scores[t] = greedy_walk(scores, theta, max_length)
        stderr = maxima.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.
        points.append(ProbePoint(n, n * (n - 1), float(maxima.mean()), float(stderr),
                                 float(lengths.mean()), float(path_scores.mean())))
    return points


def uniform_expected_max(pairs: int) -> float:
    """ E[max of m i.i.d. uniform(0, 1) scores] = m / (m + 1) """
    return pairs / (pairs + 1.)
