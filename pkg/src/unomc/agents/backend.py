"""Chat backends: a remote OpenAI-style HTTP endpoint and a scripted mock.

The scripted backend drives every offline test and mock tournament: it
maps request ordinals (and optional prompt-substring matchers) to canned
response texts, so whole pipelines replay deterministically.
"""

from __future__ import annotations

import json
import os
import time
from typing import Protocol

import requests


class BackendError(Exception):
    """The backend could not produce a response text."""


class ChatBackend(Protocol):
    def complete(self, messages: list[dict]) -> str: ...


class HttpChatBackend:
    """POSTs {model, messages, **params} and extracts the first message text.

    The bearer token is read from the environment variable named in the
    config at call time, never stored in configs or logs.
    """

    def __init__(
        self,
        url: str,
        model: str,
        api_key_env: str | None = None,
        timeout: float = 60.0,
        transport_retries: int = 2,
        params: dict | None = None,
    ):
        self.url = url
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.transport_retries = transport_retries
        self.params = dict(params or {})

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise BackendError(f"environment variable {self.api_key_env} is not set")
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def complete(self, messages: list[dict]) -> str:
        body = {"model": self.model, "messages": messages, **self.params}
        last_error: Exception | None = None
        for attempt in range(self.transport_retries + 1):
            try:
                resp = requests.post(
                    self.url, headers=self._headers(), json=body, timeout=self.timeout
                )
                if resp.status_code in (429, 500, 502, 503) and attempt < self.transport_retries:
                    time.sleep(0.2 * (attempt + 1))
                    continue
                resp.raise_for_status()
                payload = resp.json()
                return payload["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                if attempt < self.transport_retries:
                    time.sleep(0.2 * (attempt + 1))
        raise BackendError(f"chat request failed: {last_error}")


class ScriptedBackend:
    """Canned responses for offline runs.

    `entries` is a list where each item is either a plain response text
    (consumed in request order) or {"contains": <substring>, "text": <response>}
    (non-consuming, checked first).  `default` answers anything left over.
    """

    def __init__(self, entries: list | None = None, default: str | None = None):
        self.matchers = []
        self.queue = []
        for entry in entries or []:
            if isinstance(entry, str):
                self.queue.append(entry)
            elif isinstance(entry, dict) and "contains" in entry:
                self.matchers.append((entry["contains"], entry["text"]))
            else:
                raise ValueError(f"bad script entry: {entry!r}")
        self.default = default
        self.calls = 0
        self._cursor = 0

    @classmethod
    def from_file(cls, path: str) -> "ScriptedBackend":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, list):
            return cls(entries=data)
        return cls(entries=data.get("entries"), default=data.get("default"))

    def complete(self, messages: list[dict]) -> str:
        self.calls += 1
        prompt = messages[-1]["content"] if messages else ""
        for needle, text in self.matchers:
            if needle in prompt:
                return text
        if self._cursor < len(self.queue):
            text = self.queue[self._cursor]
            self._cursor += 1
            return text
        if self.default is not None:
            return self.default
        raise BackendError(f"script exhausted at call {self.calls}")


def build_backend(config) -> ChatBackend:
    """Instantiate a backend from a BackendConfig (players module)."""
    if config is None:
        raise ValueError("LLM player binding needs a backend config")
    if config.kind == "http":
        return HttpChatBackend(
            url=config.url,
            model=config.model,
            api_key_env=config.api_key_env,
            timeout=config.timeout,
            transport_retries=config.transport_retries,
            params=dict(config.params),
        )
    if config.kind == "scripted":
        if config.script_path:
            return ScriptedBackend.from_file(config.script_path)
        return ScriptedBackend(entries=list(config.script), default=config.script_default)
    raise ValueError(f"unknown backend kind {config.kind!r}")
