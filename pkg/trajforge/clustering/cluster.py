"""
Copyright © 2024 trajforge developers.

Groups tools into component-agent toolsets by average-linkage agglomeration of their
normalized co-occurrence.
"""
import json
import logging
import os
from typing import Dict, List, Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

from ..agents.config import GENE_AGENT_TOOLS, IMAGE_AGENT_TOOLS
from ..exceptions import EmptyMatrix
from .cooccurrence import CooccurrenceMatrix

logger = logging.getLogger(__name__)

KNOWN_TOOLSETS = (("ImageAgent", IMAGE_AGENT_TOOLS), ("GeneAgent", GENE_AGENT_TOOLS))


def normalized_similarity(counts: np.ndarray) -> np.ndarray:
    """ counts[a, b] / sqrt(deg(a) * deg(b)), zero for tools never adjacent to anything """
    counts = np.asarray(counts, np.float64)
    deg = counts.sum(axis=1)
    scale = np.sqrt(np.outer(deg, deg))
    sim = np.zeros_like(counts)
    np.divide(counts, scale, out=sim, where=scale > 0)
    return sim


def cluster_tools(matrix: CooccurrenceMatrix, min_link: float = 0.1) -> List[List[str]]:
    """
    Agglomerative clustering of tools.

    Clusters are merged pairwise while their average normalized co-occurrence is at
    least ``min_link``; the number of clusters follows from the data.

    Parameters
    ----------
    matrix : CooccurrenceMatrix
    min_link : float
        similarity in [0, 1] needed for a merge

    Returns
    -------
    clusters : list of list of str
        members sorted by name; clusters sorted by size descending, then first member

    Raises
    ------
    EmptyMatrix
        the matrix names no tools
    """
    n = len(matrix.tools)
    if n == 0:
        raise EmptyMatrix("co-occurrence matrix has no tools")
    if n == 1:
        return [[matrix.tools[0]]]
    dist = np.clip(1. - normalized_similarity(matrix.counts), 0., 1.)
    np.fill_diagonal(dist, 0.)
    Z = linkage(squareform(dist, checks=False), method="average")
    # average distance = 1 - average similarity
    labels = fcluster(Z, t=1. - min_link + 1e-12, criterion="distance")
    groups: Dict[int, List[str]] = {}
    for tool, label in zip(matrix.tools, labels):
        groups.setdefault(int(label), []).append(tool)
    clusters = [sorted(g) for g in groups.values()]
    clusters.sort(key=lambda c: (-len(c), c[0]))
    logger.info("%d tools grouped into %d clusters at min_link=%g", n, len(clusters), min_link)
    return clusters


def name_clusters(clusters: Sequence[Sequence[str]]) -> List[str]:
    """ ImageAgent/GeneAgent for the cluster holding most of that toolset (and a majority
    of its own members), ComponentAgent<k> otherwise """
    names = [None] * len(clusters)
    for agent_name, toolset in KNOWN_TOOLSETS:
        best, best_overlap = None, 0
        for k, cluster in enumerate(clusters):
            overlap = len(set(cluster) & set(toolset))
            if names[k] is None and 2 * overlap > len(cluster) and overlap > best_overlap:
                best, best_overlap = k, overlap
        if best is not None:
            names[best] = agent_name
    k = 0
    for i in range(len(names)):
        if names[i] is None:
            k += 1
            names[i] = f"ComponentAgent{k}"
    return names


def cluster_config(clusters: Sequence[Sequence[str]]) -> Dict:
    """ {"clusters": [{"agent_name", "tools"}]} as read by ``components_from_dict`` """
    return {"clusters": [{"agent_name": name, "tools": list(tools)}
                         for name, tools in zip(name_clusters(clusters), clusters)]}


def save_cluster_config(filename, clusters: Sequence[Sequence[str]]) -> Dict:
    config = cluster_config(clusters)
    dirname = os.path.dirname(os.fspath(filename))
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    with open(filename, "w") as f:
        json.dump(config, f, indent=2)
    return config
