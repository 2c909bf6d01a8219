"""
Copyright © 2024 trajforge developers.

Client of the MSKCC OncoTree REST API (tumor-type taxonomy).
"""
import logging
from typing import Any, Dict, List, Optional
from urllib.parse import quote

import httpx
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..exceptions import TransportError

logger = logging.getLogger(__name__)

ONCOTREE_URL = "https://oncotree.mskcc.org"
QUERY_TYPES = {"tumor": "name", "tissue": "tissue"}


def format_tumor_type(hit: Dict[str, Any]) -> str:
    children = hit.get("children") or {}
    downstream = sorted(children) if children else None
    upstream = {"parent": hit.get("parent"), "precursors": list(hit.get("precursors") or [])}
    return "\n".join([
        f"Tumor/Disease: {hit.get('name')} ({hit.get('code')})",
        f"**Main Type**: {hit.get('mainType')}",
        f"**Tissue/Organ**: {hit.get('tissue')}",
        f"**Upstream Nodes**: {upstream}",
        f"**Downstream Nodes**: {downstream}",
        "---",
    ])


class OncoTreeClient:

    def __init__(self, base_url: str = ONCOTREE_URL, timeout: float = 30.,
                 transport: Optional[httpx.BaseTransport] = None, attempts: int = 3,
                 backoff: float = 1., max_results: int = 5):
        self.base_url = base_url.rstrip("/")
        self.max_results = max_results
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._retrying = Retrying(stop=stop_after_attempt(attempts),
                                  wait=wait_exponential(multiplier=backoff, max=10),
                                  retry=retry_if_exception_type(TransportError),
                                  reraise=True)

    def _get(self, url: str) -> Optional[List[Dict[str, Any]]]:
        try:
            response = self._client.get(url, params={"exactMatch": "false"})
        except httpx.HTTPError as e:
            raise TransportError(f"GET {url} failed: {e}") from e
        if response.status_code == 404:
            return None
        if response.status_code >= 400:
            raise TransportError(f"OncoTree returned HTTP {response.status_code}")
        try:
            hits = response.json()
        except ValueError as e:
            raise TransportError("OncoTree returned malformed JSON") from e
        if not isinstance(hits, list):
            raise TransportError("OncoTree returned an unexpected body")
        return hits

    def lookup(self, query: str, query_type: str = "tumor") -> str:
        """
        Searches tumor types by name (``query_type="tumor"``) or by tissue.

        Returns
        -------
        observation : str
            one block per match, or ``No results found for query '<query>'``
        """
        if query_type not in QUERY_TYPES:
            raise ValueError(f"query_type must be one of {list(QUERY_TYPES)}")
        url = (f"{self.base_url}/api/tumorTypes/search/{QUERY_TYPES[query_type]}/"
               f"{quote(query, safe='')}")
        logger.debug("OncoTree %s search %r", query_type, query)
        hits = self._retrying.copy()(self._get, url)
        if not hits:
            return f"No results found for query '{query}'"
        return "\n".join(format_tumor_type(h) for h in hits[:self.max_results])

    def close(self):
        self._client.close()
