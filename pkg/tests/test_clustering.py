import json

import numpy as np
import pytest

from trajforge.agents import load_components
from trajforge.clustering import (CooccurrenceMatrix, cluster_config, cluster_tools,
                                  count_cooccurrence, name_clusters, normalized_similarity,
                                  save_cluster_config)
from trajforge.exceptions import EmptyMatrix
from trajforge.model import MetaTrajectory, TrajectoryStep

IMAGE_CHAIN = ("BLIPTool", "QwenVLCaptionTool", "OncoTreeTool")
GENE_CHAIN = ("DocumentGeneQueryTool", "ProteinAtlasGeneInfoTool", "PathwayKGTool")


def trajectory(actions, final=True):
    steps = [TrajectoryStep(k + 1, "t", a, "x", "o") for k, a in enumerate(actions)]
    if final:
        steps.append(TrajectoryStep(len(steps) + 1, "t", "Final Answer", "", ""))
    return MetaTrajectory("s", None, tuple(steps), "answer")


def two_block_corpus(repeats=5):
    return [trajectory(IMAGE_CHAIN) for _ in range(repeats)] + \
           [trajectory(GENE_CHAIN) for _ in range(repeats)]


def test_three_step_trajectory_gives_two_adjacent_pairs():
    matrix = count_cooccurrence([trajectory(("A", "B", "C"))])
    assert matrix.tools == ("A", "B", "C")
    assert matrix.counts.tolist() == [[0, 1, 0],
                                      [1, 0, 1],
                                      [0, 1, 0]]


def test_repeated_tool_counts_on_the_diagonal_once():
    matrix = count_cooccurrence([trajectory(("A", "A"))])
    assert matrix.counts.tolist() == [[1]]


def test_given_tool_order_comes_first():
    matrix = count_cooccurrence([trajectory(("B", "Z"))], tools=["C", "B"])
    assert matrix.tools == ("C", "B", "Z")
    assert matrix.counts[matrix.index("B"), matrix.index("Z")] == 1
    assert not matrix.counts[0].any()


def test_matrix_must_be_square_symmetric_and_non_negative():
    with pytest.raises(ValueError):
        CooccurrenceMatrix(("a", "b"), np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        CooccurrenceMatrix(("a",), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        CooccurrenceMatrix(("a", "b"), np.array([[0, -1], [-1, 0]]))


def test_normalized_similarity_handles_isolated_tools():
    sim = normalized_similarity(np.array([[0, 2, 0], [2, 0, 0], [0, 0, 0]]))
    assert sim[0, 1] == pytest.approx(1.)
    assert not sim[2].any()


def test_block_diagonal_corpus_splits_into_image_and_gene_agents():
    matrix = count_cooccurrence(two_block_corpus())
    clusters = cluster_tools(matrix, min_link=0.1)
    assert clusters == [sorted(IMAGE_CHAIN), sorted(GENE_CHAIN)]
    assert name_clusters(clusters) == ["ImageAgent", "GeneAgent"]


def test_clusters_come_largest_first_then_by_first_member():
    corpus = [trajectory(("Z1", "Z2", "Z3")) for _ in range(5)] + \
             [trajectory(("A", "B")) for _ in range(5)] + [trajectory(("D",)), trajectory(("C",))]
    clusters = cluster_tools(count_cooccurrence(corpus), min_link=0.1)
    assert clusters == [["Z1", "Z2", "Z3"], ["A", "B"], ["C"], ["D"]]


def test_raising_the_link_threshold_never_merges_more():
    matrix = count_cooccurrence(two_block_corpus())
    counts = [len(cluster_tools(matrix, min_link=m)) for m in (0., 0.1, 0.5, 0.9)]
    assert counts == sorted(counts)
    assert counts[0] == 1
    assert counts[1] == 2
    assert counts[2] == 4
    assert counts[3] == 6


def test_degenerate_matrices():
    with pytest.raises(EmptyMatrix):
        cluster_tools(CooccurrenceMatrix((), np.zeros((0, 0))))
    assert cluster_tools(CooccurrenceMatrix(("A",), np.zeros((1, 1)))) == [["A"]]


def test_unknown_toolsets_get_numbered_names():
    clusters = [["Foo", "Bar"], ["BLIPTool"], ["Baz"]]
    assert name_clusters(clusters) == ["ComponentAgent1", "ImageAgent", "ComponentAgent2"]


def test_saved_cluster_config_loads_as_components(tmpdir):
    clusters = [sorted(IMAGE_CHAIN), sorted(GENE_CHAIN)]
    filename = tmpdir.join("agents", "clusters.json")
    config = save_cluster_config(filename, clusters)
    assert config == cluster_config(clusters)
    with open(filename) as f:
        assert json.load(f)["clusters"][0]["agent_name"] == "ImageAgent"
    specs = load_components(filename)
    assert [(s.agent_name, list(s.tools)) for s in specs] == [
        ("ImageAgent", sorted(IMAGE_CHAIN)), ("GeneAgent", sorted(GENE_CHAIN))]
