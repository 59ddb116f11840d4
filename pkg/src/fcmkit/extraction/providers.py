"""LLM provider abstraction: live HTTP, deterministic replay, and recording.

A provider turns an LlmRequest into an LlmResponse. The replay provider
answers from a directory of transcript files keyed by request hash, which
makes every pipeline run over recorded fixtures bit-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

from ..errors import FixtureError, InputError, ProviderError

DEFAULT_TEMPERATURE = 1.0
DEFAULT_TOP_P = 0.95


@dataclass(frozen=True)
class LlmRequest:
    system_instruction: str
    user_content: str
    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P
    model: str = ""

    def __post_init__(self):
        if not (0.0 <= self.temperature <= 2.0):
            raise InputError(f"temperature {self.temperature} outside [0, 2]")
        if not (0.0 < self.top_p <= 1.0):
            raise InputError(f"top_p {self.top_p} outside (0, 1]")


@dataclass(frozen=True)
class LlmResponse:
    content: str
    raw_provider_payload: object = None


def request_hash(request: LlmRequest) -> str:
    """Stable digest of the request, insensitive to field ordering."""
    payload = {
        "model": request.model,
        "system_instruction": request.system_instruction,
        "temperature": f"{request.temperature:.6f}",
        "top_p": f"{request.top_p:.6f}",
        "user_content": request.user_content,
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class Provider(Protocol):
    deterministic: bool

    def complete(self, request: LlmRequest) -> LlmResponse: ...


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def transcript_text(request: LlmRequest, content: str) -> str:
    """Render one transcript file: '#' metadata header, blank line, content."""
    header = [
        f"# request_hash: {request_hash(request)}",
        f"# model: {request.model}",
        f"# temperature: {request.temperature:.6f}",
        f"# top_p: {request.top_p:.6f}",
        f"# system_instruction_sha256: {_sha(request.system_instruction)}",
        f"# user_content_sha256: {_sha(request.user_content)}",
    ]
    return "\n".join(header) + "\n\n" + content


def parse_transcript(text: str) -> tuple[dict[str, str], str]:
    """Split a transcript file into its metadata header and verbatim content."""
    head, sep, content = text.partition("\n\n")
    if not sep:
        raise FixtureError("transcript has no blank line after the metadata header")
    metadata: dict[str, str] = {}
    for line in head.splitlines():
        if not line.startswith("# "):
            raise FixtureError(f"bad transcript header line: {line!r}")
        key, _, value = line[2:].partition(": ")
        metadata[key] = value
    return metadata, content


class ReplayProvider:
    """Answers from recorded transcripts; any unrecorded request is an error."""

    deterministic = True

    def __init__(self, directory):
        self.directory = Path(directory)

    def complete(self, request: LlmRequest) -> LlmResponse:
        digest = request_hash(request)
        path = self.directory / f"{digest}.txt"
        if not path.is_file():
            raise FixtureError(
                f"no recorded transcript {digest}.txt in {self.directory}"
            )
        _, content = parse_transcript(path.read_text(encoding="utf-8"))
        return LlmResponse(content=content)


class RecordingProvider:
    """Delegates to another provider and records each exchange for replay."""

    def __init__(self, inner, directory):
        self.inner = inner
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.deterministic = bool(getattr(inner, "deterministic", False))

    def complete(self, request: LlmRequest) -> LlmResponse:
        response = self.inner.complete(request)
        path = self.directory / f"{request_hash(request)}.txt"
        path.write_text(transcript_text(request, response.content), encoding="utf-8")
        return response


class ScriptedProvider:
    """Computes responses with a caller-supplied function; used to author fixtures."""

    deterministic = True

    def __init__(self, respond: Callable[[LlmRequest], str]):
        self._respond = respond

    def complete(self, request: LlmRequest) -> LlmResponse:
        return LlmResponse(content=self._respond(request))


class HttpProvider:
    """Chat-completion-style HTTP provider configured from the environment.

    Reads LLM_BASE_URL, LLM_MODEL, and LLM_API_KEY unless given explicitly.
    Retries transient failures with exponential backoff before giving up.
    """

    deterministic = False

    def __init__(
        self,
        base_url: str | None = None,
        model: str | None = None,
        api_key: str | None = None,
        *,
        max_attempts: int = 3,
        timeout: float = 60.0,
        backoff: float = 0.5,
    ):
        self.base_url = (base_url or os.environ.get("LLM_BASE_URL", "")).rstrip("/")
        self.model = model or os.environ.get("LLM_MODEL", "")
        self.api_key = api_key or os.environ.get("LLM_API_KEY", "")
        if not self.base_url:
            raise InputError("no provider base URL; set LLM_BASE_URL")
        self.max_attempts = max_attempts
        self.timeout = timeout
        self.backoff = backoff

    def complete(self, request: LlmRequest) -> LlmResponse:
        import httpx

        body = {
            "model": request.model or self.model,
            "messages": [
                {"role": "system", "content": request.system_instruction},
                {"role": "user", "content": request.user_content},
            ],
            "temperature": request.temperature,
            "top_p": request.top_p,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_status: int | None = None
        last_error = "unknown error"
        attempts_made = 0
        for attempt in range(1, self.max_attempts + 1):
            attempts_made = attempt
            try:
                reply = httpx.post(
                    f"{self.base_url}/chat/completions",
                    json=body,
                    headers=headers,
                    timeout=self.timeout,
                )
                last_status = reply.status_code
                if reply.status_code == 200:
                    payload = reply.json()
                    content = payload["choices"][0]["message"]["content"]
                    return LlmResponse(content=content, raw_provider_payload=payload)
                last_error = f"HTTP {reply.status_code}: {reply.text[:200]}"
                # Client errors other than rate limiting will not improve on retry.
                if 400 <= reply.status_code < 500 and reply.status_code != 429:
                    break
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last_error = f"{type(exc).__name__}: {exc}"
            if attempt < self.max_attempts:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
        raise ProviderError(
            f"provider failed after {attempts_made} attempt(s): {last_error}",
            attempts=attempts_made,
            last_status=last_status,
        )
