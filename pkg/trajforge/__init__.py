"""
Copyright © 2024 trajforge developers.
"""
from .version import version
from .default_settings import default_settings, validate_settings
from .model import AenNode, MetaTrajectory, Connection, RunRecord, ToolCallRecord
from .synthesis import generate_aen, discover_connections, construct_trajectories
from .agents import run_planner
from .metrics import evaluate_dataset
from .run_pipeline import synthesize, run_queries

name = "trajforge"
