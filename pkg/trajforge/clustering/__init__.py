"""
Copyright © 2024 trajforge developers.
"""
from .cooccurrence import CooccurrenceMatrix, count_cooccurrence
from .cluster import (cluster_tools, cluster_config, save_cluster_config, name_clusters,
                      normalized_similarity)
