"""
Copyright © 2024 trajforge developers.
"""
from .trajectory import (AenNode, TrajectoryStep, MetaTrajectory, Connection, ToolCallRecord,
                         ID_SEPARATOR, is_error_observation, action_input_text)
from .run import RunRecord, ComponentRun, STOP_MESSAGE, FINAL_ANSWER, ITERATION_LIMIT, TIMEOUT
from .jsonl import write_jsonl, read_jsonl, save_jsonl, load_jsonl
