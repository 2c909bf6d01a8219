"""
Copyright © 2024 trajforge developers.
"""
from .aen import generate_aen, AEN_PROMPT
from .connect import (ConnectionParams, HashScorer, LLMConnectionScorer, discover_connections,
                      sample_pairs, image_compatible, parse_connection_reply)
from .construct import (ConstructionParams, construct_trajectories, trajectory_quality,
                        build_steps, synthesize_answer)
from .dataset import (filter_trajectories, split_dataset, judge_filter, apportion,
                      FilterResult, DatasetSplit)
from .scalability import (scalability_probe, uniform_sampler, constant_sampler,
                          uniform_expected_max, ProbePoint)
