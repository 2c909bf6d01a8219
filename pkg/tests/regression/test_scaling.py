"""
Scalability probe regressions: closed-form uniform maxima, saturated greedy paths and
agreement between the compiled greedy walk and trajectory construction.
"""
import numpy as np
import pytest

from trajforge.model import Connection
from trajforge.synthesis import (ConstructionParams, construct_trajectories, scalability_probe,
                                 trajectory_quality, uniform_expected_max)
from trajforge.synthesis.scalability import greedy_walk

from utils import FixedAnswer, random_nodes


def test_uniform_maxima_track_the_closed_form_as_the_pool_grows():
    points = scalability_probe([2, 4, 8, 16, 32], trials=400, seed=5)
    assert [p.pairs for p in points] == [2, 12, 56, 240, 992]
    for p in points:
        assert abs(p.mean_max - uniform_expected_max(p.pairs)) <= 4 * p.stderr + 1e-12
    assert points[-1].mean_max > 0.99


def test_greedy_path_visits_min_of_pool_and_length_cap_without_threshold():
    points = scalability_probe([3, 6, 9, 20], trials=50, max_length=8)
    assert [p.mean_reachable_length for p in points] == [3, 6, 8, 8]


def test_threshold_shortens_paths():
    free = scalability_probe([10], trials=200, seed=2, theta=0.)[0]
    strict = scalability_probe([10], trials=200, seed=2, theta=0.9)[0]
    assert strict.mean_reachable_length < free.mean_reachable_length
    assert strict.mean_max >= 0.9


@pytest.mark.parametrize("seed, n, max_length", [(0, 5, 8), (1, 9, 4), (2, 12, 8)])
def test_greedy_walk_matches_first_constructed_trajectory(seed, n, max_length):
    rng = np.random.default_rng(seed)
    scores = rng.random((n, n))
    np.fill_diagonal(scores, -1.)
    nodes = random_nodes(rng, n, images=(None,))
    connections = sorted((Connection(nodes[i].id, nodes[j].id, float(scores[i, j]), "r")
                          for i in range(n) for j in range(n) if i != j),
                         key=lambda c: (-c.score, c.src, c.dst))
    first = construct_trajectories(nodes, connections,
                                   ConstructionParams(max_length, n * n, 1), FixedAnswer())[0]
    length, total = greedy_walk(scores, 0., max_length)
    assert len(first) == length
    assert trajectory_quality(first, connections) == pytest.approx(total)


@pytest.mark.slow
def test_construction_time_grows_about_linearly_with_the_connection_count():
    from benchmarks.scalability import construction_scaling

    timings = construction_scaling(1000, 4000, 3, ConstructionParams(8, 3, 10000), seed=3)
    assert [t.connections for t in timings] == [4000, 8000, 16000, 32000]
    first = timings[0]
    for t in timings[1:]:
        growth = t.connections / first.connections
        # slack for timer noise
        assert t.seconds <= 3 * growth * first.seconds + 0.5
        assert 0 < t.trajectories <= 1000 * 3
