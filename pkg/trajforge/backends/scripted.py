"""
Copyright © 2024 trajforge developers.

Deterministic backends: a scripted list of replies, and cassettes of recorded
(fingerprint, response) pairs that are replayed in order.
"""
import json
import logging
import os
import threading
from typing import List, NamedTuple, Sequence

from ..exceptions import CassetteMismatch, ConfigError, ScriptExhausted
from .base import Backend, CompletionRequest, fingerprint

logger = logging.getLogger(__name__)


class ScriptedBackend:
    """Returns the scripted replies one after the other."""

    def __init__(self, replies: Sequence[str], name: str = "scripted"):
        self.replies = list(replies)
        self.name = name
        self.requests: List[CompletionRequest] = []
        self._pos = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, filename, name: str = "scripted"):
        """Loads a JSON list of reply strings."""
        if not filename:
            raise ConfigError(f"the {name} backend needs a script file")
        with open(filename, "r", encoding="utf-8") as f:
            replies = json.load(f)
        if not isinstance(replies, list) or not all(isinstance(r, str) for r in replies):
            raise ConfigError(f"script file {filename} must hold a JSON list of strings")
        return cls(replies, name=name)

    @property
    def remaining(self) -> int:
        return len(self.replies) - self._pos

    def complete(self, request: CompletionRequest) -> str:
        with self._lock:
            if self._pos >= len(self.replies):
                raise ScriptExhausted(
                    f"{self.name} backend ran out of replies after {len(self.replies)} calls")
            reply = self.replies[self._pos]
            self._pos += 1
            self.requests.append(request)
        logger.debug("%s reply %d: %r", self.name, self._pos, reply[:200])
        return reply


class CassetteEntry(NamedTuple):
    fingerprint: str
    response: str


class Cassette:
    """Ordered (fingerprint, response) pairs stored as JSONL."""

    def __init__(self, entries: Sequence[CassetteEntry] = ()):
        self.entries = [CassetteEntry(*e) for e in entries]

    def __len__(self):
        return len(self.entries)

    @classmethod
    def load(cls, filename):
        entries = []
        with open(filename, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    d = json.loads(line)
                    entries.append(CassetteEntry(d["fingerprint"], d["response"]))
                except (ValueError, KeyError) as e:
                    raise ConfigError(f"cassette {filename} line {line_no}: {e}") from e
        return cls(entries)

    def append(self, entry: CassetteEntry, filename=None):
        self.entries.append(entry)
        if filename:
            with open(filename, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry._asdict(), ensure_ascii=False) + "\n")

    def save(self, filename):
        with open(filename, "w", encoding="utf-8") as f:
            for e in self.entries:
                f.write(json.dumps(e._asdict(), ensure_ascii=False) + "\n")


class ReplayBackend:
    """Replays a cassette in order; each request must match the recorded fingerprint."""

    def __init__(self, cassette: Cassette):
        self.cassette = cassette
        self._pos = 0
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> str:
        key = fingerprint(request)
        with self._lock:
            if self._pos >= len(self.cassette):
                raise ScriptExhausted(f"cassette exhausted after {len(self.cassette)} entries")
            entry = self.cassette.entries[self._pos]
            if entry.fingerprint != key:
                raise CassetteMismatch(
                    f"request {self._pos} fingerprint {key[:12]} does not match the "
                    f"recorded {entry.fingerprint[:12]}")
            self._pos += 1
        return entry.response


class RecordingBackend:
    """Forwards to ``inner`` and appends every exchange to a cassette file."""

    def __init__(self, inner: Backend, filename):
        self.inner = inner
        self.filename = filename
        self.cassette = Cassette()
        self._lock = threading.Lock()
        dirname = os.path.dirname(os.fspath(filename))
        if dirname:
            os.makedirs(dirname, exist_ok=True)
        open(filename, "w").close()

    def complete(self, request: CompletionRequest) -> str:
        response = self.inner.complete(request)
        with self._lock:
            self.cassette.append(CassetteEntry(fingerprint(request), response), self.filename)
        return response
