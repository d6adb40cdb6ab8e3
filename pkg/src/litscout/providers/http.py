"""Minimal HTTP provider clients.

Endpoints come from the config file; credentials from environment
variables (LLM_API_KEY, DEEP_RESEARCH_API_KEY, METADATA_API_KEY). The
wire contracts are deliberately small JSON bodies; anything fancier
belongs behind a connector-specific client.
"""

from __future__ import annotations

import requests

from litscout.errors import AuthenticationError, ProviderError, TransientProviderError
from litscout.providers.base import PaperMetadata
from litscout.providers.prompts import PromptRequest


def _check_response(response: requests.Response, what: str) -> None:
    if response.status_code in (401, 403):
        raise AuthenticationError(f"{what}: {response.status_code}")
    if response.status_code == 429 or response.status_code >= 500:
        raise TransientProviderError(f"{what}: {response.status_code}")
    if response.status_code >= 400:
        raise ProviderError(f"{what}: {response.status_code} {response.text[:200]}")


def _headers(api_key: str | None) -> dict:
    return {"Authorization": f"Bearer {api_key}"} if api_key else {}


class HttpLLM:
    def __init__(self, endpoint: str, api_key: str | None = None, timeout: float = 120.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout

    def complete(self, request: PromptRequest) -> str:
        try:
            response = requests.post(
                self.endpoint,
                json={
                    "system": request.system,
                    "prompt": request.prompt,
                    "template_id": request.template_id.value,
                },
                headers=_headers(self.api_key),
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransientProviderError(f"llm endpoint unreachable: {exc}") from exc
        _check_response(response, "llm")
        return response.json()["text"]


class HttpDeepResearch:
    provider_id = "http"

    def __init__(self, endpoint: str, api_key: str | None = None, timeout: float = 600.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout

    def ask(self, question_text: str) -> dict:
        try:
            response = requests.post(
                self.endpoint,
                json={"question": question_text},
                headers=_headers(self.api_key),
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransientProviderError(f"deep research unreachable: {exc}") from exc
        _check_response(response, "deep_research")
        return response.json()


class HttpMetadata:
    def __init__(self, endpoint: str, api_key: str | None = None, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout

    def _get(self, params: dict) -> PaperMetadata | None:
        try:
            response = requests.get(
                f"{self.endpoint}/paper",
                params=params,
                headers=_headers(self.api_key),
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransientProviderError(f"metadata unreachable: {exc}") from exc
        if response.status_code == 404:
            return None
        _check_response(response, "metadata")
        data = response.json()
        return PaperMetadata(
            paper_id=data["paper_id"],
            title=data["title"],
            url=data.get("url"),
            abstract=data.get("abstract", ""),
        )

    def lookup_id(self, paper_id: str) -> PaperMetadata | None:
        return self._get({"id": paper_id})

    def search_title(self, title: str) -> PaperMetadata | None:
        return self._get({"title": title})
