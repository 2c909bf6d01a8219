"""
Copyright © 2024 trajforge developers.
"""
import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

try:
    from typing import Protocol
except ImportError:  # python < 3.8
    from typing_extensions import Protocol

logger = logging.getLogger(__name__)

MAX_GENERATION = 2048


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    images: Tuple[str, ...] = ()
    max_tokens: int = MAX_GENERATION
    temperature: float = 0.

    def __post_init__(self):
        if not isinstance(self.images, tuple):
            object.__setattr__(self, "images", tuple(i for i in self.images if i))
        if isinstance(self.max_tokens, bool) or not isinstance(self.max_tokens, int) \
                or self.max_tokens <= 0:
            raise ValueError(f"max_tokens must be a positive integer, got {self.max_tokens!r}")

    @classmethod
    def for_prompt(cls, prompt: str, images: Optional[Sequence[str]] = None,
                   max_tokens: int = MAX_GENERATION, temperature: float = 0.):
        return cls(prompt, tuple(i for i in (images or ()) if i), max_tokens, temperature)


def fingerprint(request: CompletionRequest) -> str:
    """sha256 of (prompt, max_tokens); timestamps and images never enter it."""
    payload = json.dumps([request.prompt, request.max_tokens], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Backend(Protocol):
    """Anything that turns a rendered prompt into a completion."""

    def complete(self, request: CompletionRequest) -> str:
        ...


def complete(request: CompletionRequest, backend: Backend,
             max_generation: int = MAX_GENERATION) -> str:
    """
    Sends ``request`` to ``backend`` after checking the generation cap.

    Raises
    ------
    ValueError
        if ``request.max_tokens`` exceeds ``max_generation``
    BackendError
        whatever the backend raises (TransportError, QuotaError, ScriptExhausted, ...)
    """
    if request.max_tokens > max_generation:
        raise ValueError(f"max_tokens {request.max_tokens} exceeds the generation limit "
                         f"{max_generation}")
    logger.debug("completion request %s (%d chars)", fingerprint(request)[:12],
                 len(request.prompt))
    text = backend.complete(request)
    logger.debug("completion response %s: %r", fingerprint(request)[:12], text[:200])
    return text
