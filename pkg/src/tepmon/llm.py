"""Language-model backends: an HTTP chat-completions client and a
deterministic stub for tests, plus the append-only request audit log."""

from __future__ import annotations

import datetime
import json
import os
import threading
from typing import Callable, Protocol

import httpx

from .errors import BackendUnavailable


class LlmBackend(Protocol):
    model_name: str

    def complete(self, system: str, messages: list[dict]) -> str:
        """messages: [{"role": "user"|"assistant", "content": str}, ...]"""
        ...


class HttpChatBackend:
    """Client for an OpenAI-style chat-completions endpoint.

    The API key comes from the environment (default TEPMON_API_KEY);
    temperature is pinned to 0 for the most deterministic output the
    backend offers.
    """

    def __init__(
        self,
        base_url: str,
        model_name: str,
        api_key_env: str = "TEPMON_API_KEY",
        timeout: float = 120.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.model_name = model_name
        self.api_key_env = api_key_env
        self.timeout = timeout

    def complete(self, system: str, messages: list[dict]) -> str:
        api_key = os.environ.get(self.api_key_env, "")
        payload = {
            "model": self.model_name,
            "temperature": 0,
            "messages": [{"role": "system", "content": system}, *messages],
        }
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        try:
            resp = httpx.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers=headers,
                timeout=self.timeout,
            )
            resp.raise_for_status()
            return resp.json()["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise BackendUnavailable(str(exc)) from exc


class StubBackend:
    """Deterministic in-process backend for tests and offline runs."""

    model_name = "stub"

    def __init__(self, reply: str | Callable[[str, list[dict]], str] = ""):
        self._reply = reply
        self.calls: list[tuple[str, list[dict]]] = []

    def complete(self, system: str, messages: list[dict]) -> str:
        self.calls.append((system, [dict(m) for m in messages]))
        if callable(self._reply):
            return self._reply(system, messages)
        return self._reply


class FlakyBackend:
    """Test helper: fails a fixed number of times before delegating."""

    def __init__(self, inner: LlmBackend, failures: int):
        self.inner = inner
        self.failures_left = failures

    @property
    def model_name(self) -> str:
        return self.inner.model_name

    def complete(self, system: str, messages: list[dict]) -> str:
        if self.failures_left > 0:
            self.failures_left -= 1
            raise BackendUnavailable("injected failure")
        return self.inner.complete(system, messages)


class AuditLog:
    """Append-only JSON-lines log of every backend request/response."""

    def __init__(self, path: str | os.PathLike | None):
        self.path = path
        self._lock = threading.Lock()

    def record(self, event: str, payload: dict) -> None:
        if self.path is None:
            return
        entry = {
            "ts": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "event": event,
            **payload,
        }
        with self._lock:
            with open(self.path, "a") as fh:
                fh.write(json.dumps(entry) + "\n")
