"""
Copyright © 2024 trajforge developers.
"""
import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from numba import njit

from ..exceptions import OffsetOutOfRange
from .react import ACTION, ACTION_INPUT, THOUGHT, Segment

CHANNELS = {THOUGHT: 0, ACTION: 1, ACTION_INPUT: 2}


@dataclass(frozen=True)
class SegmentMask:
    batch: int
    visual_len: int
    text_len: int
    entries: np.ndarray  # uint8, batch x (visual_len + text_len) x 3

    @property
    def seq_len(self) -> int:
        return self.visual_len + self.text_len

    def positions(self, channel: int, b: int = 0) -> np.ndarray:
        """ sequence positions with ``channel`` set """
        return np.nonzero(self.entries[b, :, channel])[0]


@njit(cache=True)
def _assign_channels(offsets, seg_start, seg_end, seg_channel, out):
    """ token t takes the channel of the first segment its byte range intersects """
    for t in range(offsets.shape[0]):
        a = offsets[t, 0]
        b = offsets[t, 1]
        for s in range(seg_start.shape[0]):
            if seg_start[s] < b and a < seg_end[s]:
                out[t, seg_channel[s]] = 1
                break


def whitespace_token_offsets(text) -> np.ndarray:
    """ byte ranges of whitespace-separated tokens of ``text`` (Lt x 2, int64) """
    data = text.encode("utf-8") if isinstance(text, str) else text
    spans = [m.span() for m in re.finditer(rb"\S+", data)]
    return np.array(spans, dtype=np.int64).reshape(-1, 2)


def generate_segment_mask(token_offsets, segments: Sequence[Segment], visual_len: int,
                          batch: int = 1, n_bytes: Optional[int] = None,
                          text: Optional[Union[str, bytes]] = None) -> SegmentMask:
    """
    Marks text tokens belonging to Thought, Action and Action Input content.

    Parameters
    ----------
    token_offsets : array-like, Lt x 2
        half-open byte range of every text token, ascending and non-overlapping
    segments : sequence of Segment
        output of ``parse_transcript``; only content spans are matched, markers excluded
    visual_len : int
        number of visual positions prepended to the sequence (all zero in the mask)
    batch : int
        number of identical rows
    n_bytes : int, optional
        byte length of the text
    text : str or bytes, optional
        the transcript itself, measured when ``n_bytes`` is not given. Without either the
        last segment ends the text; with no segments either, tokens cannot be checked and
        a ValueError is raised

    Returns
    -------
    mask : SegmentMask
        ``entries[b, visual_len + t, c]`` is 1 iff token t intersects a segment of
        channel c (0 Thought, 1 Action, 2 Action Input)
    """
    offsets = np.asarray(token_offsets, dtype=np.int64).reshape(-1, 2)
    if visual_len < 0 or batch < 1:
        raise ValueError("visual_len must be >= 0 and batch >= 1")
    if n_bytes is None and text is not None:
        n_bytes = len(text.encode("utf-8") if isinstance(text, str) else text)
    if n_bytes is None and len(segments):
        n_bytes = max(s.span[1] for s in segments)
    if offsets.shape[0]:
        if n_bytes is None:
            raise ValueError("text length unknown: pass text or n_bytes when there are no "
                             "segments")
        if (offsets[:, 1] < offsets[:, 0]).any():
            raise ValueError("token offsets must have start <= end")
        if (offsets[1:, 0] < offsets[:-1, 1]).any():
            raise ValueError("token offsets must be ascending and non-overlapping")
        if offsets[0, 0] < 0 or offsets[-1, 1] > n_bytes:
            raise OffsetOutOfRange(
                f"token range [{offsets[:, 0].min()}, {offsets[:, 1].max()}) exceeds the "
                f"text length {n_bytes}")
    kept = [s for s in segments if s.kind in CHANNELS]
    seg_start = np.array([s.content_span[0] for s in kept], dtype=np.int64)
    seg_end = np.array([s.content_span[1] for s in kept], dtype=np.int64)
    seg_channel = np.array([CHANNELS[s.kind] for s in kept], dtype=np.int64)

    text_mask = np.zeros((offsets.shape[0], 3), np.uint8)
    if len(kept) and offsets.shape[0]:
        _assign_channels(offsets, seg_start, seg_end, seg_channel, text_mask)
    entries = np.zeros((batch, visual_len + offsets.shape[0], 3), np.uint8)
    entries[:, visual_len:] = text_mask[np.newaxis]
    return SegmentMask(batch, visual_len, offsets.shape[0], entries)
