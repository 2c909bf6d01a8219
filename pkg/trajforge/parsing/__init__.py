"""
Copyright © 2024 trajforge developers.
"""
from .react import (Segment, ParsedAction, parse_transcript, extract_action, leading_text,
                    action_sequence, clean_action, final_answer, inline_text, render_steps,
                    render_trajectory, segments_to_steps, RECOVERY_OBSERVATION,
                    FINAL_ANSWER_ACTION, THOUGHT, ACTION, ACTION_INPUT, OBSERVATION,
                    FINAL_ANSWER, KINDS)
from .coerce import coerce_action_input, schema_model, first_json_object, PARSING_TEMPLATE
from .mask import SegmentMask, generate_segment_mask, whitespace_token_offsets, CHANNELS
