"""
Copyright © 2024 trajforge developers.
"""
import json
import logging
import os
import threading
from typing import Dict, List, Optional

import httpx

from ..exceptions import CassetteMismatch

logger = logging.getLogger(__name__)


def url_key(url: str):
    """Host, decoded path and sorted decoded query of a URL; insensitive to escaping."""
    u = httpx.URL(url)
    return u.host, u.path, tuple(sorted(u.params.multi_items()))


class CassetteTransport(httpx.BaseTransport):
    """
    httpx transport that records or replays HTTP exchanges as JSONL lines of
    ``{"method", "url", "status", "body"}``.

    In replay mode a request is answered by the first unused entry with the same method
    and URL. In record mode requests go through ``inner`` (a real ``HTTPTransport`` by
    default) and every exchange is appended to the file.
    """

    def __init__(self, filename, mode: str = "replay",
                 inner: Optional[httpx.BaseTransport] = None):
        if mode not in ("replay", "record"):
            raise ValueError(f"unknown cassette mode {mode!r}")
        self.filename = filename
        self.mode = mode
        self._lock = threading.Lock()
        self.entries: List[Dict] = []
        self._used: List[bool] = []
        if mode == "replay":
            with open(filename, "r", encoding="utf-8") as f:
                self.entries = [json.loads(line) for line in f if line.strip()]
            self._used = [False] * len(self.entries)
        else:
            self.inner = inner or httpx.HTTPTransport()
            dirname = os.path.dirname(os.fspath(filename))
            if dirname:
                os.makedirs(dirname, exist_ok=True)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        method, url = request.method, str(request.url)
        if self.mode == "record":
            response = self.inner.handle_request(request)
            body = response.read().decode("utf-8")
            entry = {"method": method, "url": url, "status": response.status_code,
                     "body": body}
            with self._lock:
                self.entries.append(entry)
                with open(self.filename, "a", encoding="utf-8") as f:
                    f.write(json.dumps(entry, ensure_ascii=False) + "\n")
            logger.debug("recorded %s %s -> %d", method, url, response.status_code)
            return httpx.Response(response.status_code, content=body.encode("utf-8"),
                                  headers={"content-type": "application/json"},
                                  request=request)
        with self._lock:
            for k, entry in enumerate(self.entries):
                if not self._used[k] and entry["method"] == method \
                        and url_key(entry["url"]) == url_key(url):
                    self._used[k] = True
                    break
            else:
                raise CassetteMismatch(f"no recorded exchange for {method} {url}")
        logger.debug("replayed %s %s -> %d", method, url, entry["status"])
        return httpx.Response(entry["status"], content=entry["body"].encode("utf-8"),
                              headers={"content-type": "application/json"},
                              request=request)
