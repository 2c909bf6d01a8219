"""
Copyright © 2024 trajforge developers.
"""
import base64
import logging
import mimetypes
import os
import threading
from typing import Any, Dict, Optional

import httpx
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..exceptions import BackendError, ConfigError, QuotaError, TransportError
from .base import CompletionRequest

logger = logging.getLogger(__name__)


def image_part(path: str) -> Dict[str, Any]:
    """
    Chat content part for an image reference. Local files are inlined as base64 data
    URLs; anything else is passed through as a URL.
    """
    if os.path.isfile(path):
        mime = mimetypes.guess_type(path)[0] or "image/png"
        with open(path, "rb") as f:
            data = base64.b64encode(f.read()).decode("ascii")
        url = f"data:{mime};base64,{data}"
    else:
        url = path
    return {"type": "image_url", "image_url": {"url": url}}


class OpenAICompatibleBackend:
    """
    Chat-completions client for any OpenAI-compatible endpoint.

    Parameters
    ----------
    base_url : str
        endpoint root, e.g. ``http://localhost:8000/v1``
    model : str
        model name sent in the payload
    api_key : str, optional
        bearer token
    timeout : float
        seconds per request
    max_in_flight : int
        concurrent requests allowed across threads sharing this backend
    attempts : int
        tries per request for transport failures, 5xx and 429 replies
    backoff : float
        multiplier of the exponential wait between tries (0 disables waiting)
    transport : httpx.BaseTransport, optional
        replaces the network transport (``httpx.MockTransport`` in tests)
    """

    def __init__(self, base_url: str, model: str, api_key: Optional[str] = None,
                 timeout: float = 60., max_in_flight: int = 4, attempts: int = 3,
                 backoff: float = 1., transport: Optional[httpx.BaseTransport] = None):
        if not model:
            raise ConfigError("setting 'model' is required by the openai backend")
        self.model = model
        self.url = base_url.rstrip("/") + "/chat/completions"
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(timeout=timeout, headers=headers, transport=transport)
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._retrying = Retrying(
            stop=stop_after_attempt(attempts),
            wait=wait_exponential(multiplier=backoff, max=30),
            retry=retry_if_exception_type((TransportError, QuotaError)),
            reraise=True,
        )

    @classmethod
    def from_settings(cls, settings, model: Optional[str] = None, transport=None):
        return cls(settings["base_url"], model or settings["model"],
                   api_key=os.environ.get(settings["api_key_env"]),
                   timeout=settings["request_timeout"],
                   max_in_flight=settings["max_in_flight"], transport=transport)

    def payload(self, request: CompletionRequest) -> Dict[str, Any]:
        if request.images:
            content: Any = [{"type": "text", "text": request.prompt}]
            content += [image_part(p) for p in request.images]
        else:
            content = request.prompt
        return {
            "model": self.model,
            "messages": [{"role": "user", "content": content}],
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }

    def _post(self, payload: Dict[str, Any]) -> str:
        try:
            response = self._client.post(self.url, json=payload)
        except httpx.HTTPError as e:
            raise TransportError(f"POST {self.url} failed: {e}") from e
        if response.status_code == 429:
            raise QuotaError(f"quota exceeded at {self.url}: {response.text[:200]}")
        if response.status_code >= 500:
            raise TransportError(f"server error {response.status_code} at {self.url}")
        if response.status_code >= 400:
            raise BackendError(f"request rejected ({response.status_code}): "
                                 f"{response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise TransportError(f"malformed chat-completion body from {self.url}") from e

    def complete(self, request: CompletionRequest) -> str:
        payload = self.payload(request)
        logger.debug("POST %s model=%s max_tokens=%d", self.url, self.model,
                     request.max_tokens)
        with self._slots:
            text = self._retrying.copy()(self._post, payload)
        logger.debug("chat completion: %r", text[:200])
        return text

    def close(self):
        self._client.close()
