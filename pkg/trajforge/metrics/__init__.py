"""
Copyright © 2024 trajforge developers.
"""
from .scores import (trajectory_success_score, is_successful, jaccard_similarity, tokenize,
                     tool_redundancy_rate, tool_consistency_f1, ToolF1)
from .judge import (answer_consistency, hallucination_rate, hallucination_score, mc_accuracy,
                    parse_score, judge_score, HallucinationItem)
from .report import MetricReport, evaluate_dataset, expected_tools
