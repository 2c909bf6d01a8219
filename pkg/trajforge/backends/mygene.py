"""
Copyright © 2024 trajforge developers.
"""
import logging
from typing import Any, Dict, Optional

import httpx
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..exceptions import TransportError

logger = logging.getLogger(__name__)

MYGENE_URL = "https://mygene.info/v3"
FIELDS = "symbol,name,summary,entrezgene"


def format_gene(k: int, hit: Dict[str, Any]) -> str:
    entrez = hit.get("entrezgene", hit.get("_id"))
    summary = hit.get("summary") or "No summary available."
    return (f"{k}. Gene entry: {hit.get('name')} (Entrez ID: {entrez}, "
            f"Correlation Score: {hit.get('_score')})\nSummary: {summary}")


class MyGeneClient:
    """ gene summaries ranked by MyGene.info query score """

    def __init__(self, base_url: str = MYGENE_URL, timeout: float = 30.,
                 transport: Optional[httpx.BaseTransport] = None, attempts: int = 3,
                 backoff: float = 1.):
        self.base_url = base_url.rstrip("/")
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._retrying = Retrying(stop=stop_after_attempt(attempts),
                                  wait=wait_exponential(multiplier=backoff, max=10),
                                  retry=retry_if_exception_type(TransportError),
                                  reraise=True)

    def _get(self, params):
        url = f"{self.base_url}/query"
        try:
            response = self._client.get(url, params=params)
        except httpx.HTTPError as e:
            raise TransportError(f"GET {url} failed: {e}") from e
        if response.status_code >= 400:
            raise TransportError(f"MyGene returned HTTP {response.status_code}")
        return response

    def query(self, query: str, top_k: int = 3) -> str:
        params = {"q": query, "size": top_k, "fields": FIELDS}
        logger.debug("MyGene query %r (top %d)", query, top_k)
        response = self._retrying.copy()(self._get, params)
        try:
            body = response.json()
            hits = body.get("hits", [])
        except (ValueError, AttributeError) as e:
            # malformed bodies are not retried
            raise TransportError("MyGene returned malformed JSON") from e
        if not hits:
            return "No results found."
        return "\n\n".join(format_gene(k + 1, h) for k, h in enumerate(hits[:top_k]))

    def close(self):
        self._client.close()
