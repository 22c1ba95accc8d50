"""Chat-model backends: a remote chat-completions client and a scripted double.

Both take an ordered message list and return a single AI message. The wire
format is the standard chat-completions JSON body; requests are encoded with
a fixed canonical serialization (UTF-8, no whitespace, key order model,
temperature, max_tokens, messages) so recorded fixtures can be compared
byte-for-byte.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from typing import Protocol

import requests

from .messages import Message, Role

DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_API_KEY_ENV = "OPENAI_API_KEY"

# Role names used on the wire differ from the internal tags.
WIRE_ROLE = {Role.SYSTEM: "system", Role.HUMAN: "user", Role.AI: "assistant"}
INTERNAL_ROLE = {v: k for k, v in WIRE_ROLE.items()}


class ModelError(Exception):
    """Base class for everything a backend can raise."""


class NetworkError(ModelError):
    """Endpoint unreachable, timed out, or failed server-side."""


class AuthError(ModelError):
    """Credential missing or rejected."""


class RateLimited(ModelError):
    """Request was throttled; retry_after (seconds) is surfaced when known."""

    def __init__(self, message: str, retry_after: float | None = None) -> None:
        super().__init__(message)
        self.retry_after = retry_after


class MalformedResponse(ModelError):
    """Response body violates the wire schema."""


class ScriptExhausted(ModelError):
    """The scripted backend ran out of prepared replies."""


@dataclass(frozen=True)
class ModelConfig:
    """Backend selection and sampling parameters.

    Only the *name* of the credential's environment variable is stored; the
    credential itself never lives in config objects, files, or logs.
    """

    model_name: str = "gpt-4"
    temperature: float = 0.5
    max_tokens: int | None = None
    endpoint_url: str = DEFAULT_ENDPOINT
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0.0, 2.0]")
        if self.max_tokens is not None and self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class CompletionRequest:
    """One model call: a config plus a non-empty ordered message list."""

    config: ModelConfig
    messages: tuple[Message, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "messages", tuple(self.messages))
        if not self.messages:
            raise ValueError("a completion request needs at least one message")


def encode_request(request: CompletionRequest) -> bytes:
    """Serialize a request to its canonical wire bytes."""
    cfg = request.config
    body: dict = {"model": cfg.model_name, "temperature": cfg.temperature}
    if cfg.max_tokens is not None:
        body["max_tokens"] = cfg.max_tokens
    body["messages"] = [
        {"role": WIRE_ROLE[m.role], "content": m.content} for m in request.messages
    ]
    return json.dumps(body, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def decode_response(data: bytes) -> Message:
    """Extract the first choice's message content as an AI message.

    The wire role tag is ignored: whatever the server claims, the reply is an
    AI message by construction.
    """
    try:
        payload = json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedResponse(f"response is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise MalformedResponse("response is not a JSON object")
    choices = payload.get("choices")
    if not isinstance(choices, list) or not choices:
        raise MalformedResponse("response has no choices")
    first = choices[0]
    if not isinstance(first, dict) or not isinstance(first.get("message"), dict):
        raise MalformedResponse("first choice has no message object")
    content = first["message"].get("content")
    if not isinstance(content, str):
        raise MalformedResponse("first choice's message has no content")
    return Message(Role.AI, content)


class ChatBackend(Protocol):
    """Anything that can turn a completion request into one AI message."""

    def complete(self, request: CompletionRequest) -> Message: ...


class HttpBackend:
    """Remote chat-completions backend over HTTP POST.

    Stateless per request, so a single instance is safe for concurrent calls.
    No automatic retries: RateLimited and NetworkError surface to the caller,
    which owns the retry policy.
    """

    def complete(self, request: CompletionRequest) -> Message:
        cfg = request.config
        credential = os.environ.get(cfg.api_key_env)
        if not credential:
            raise AuthError(f"environment variable {cfg.api_key_env} is not set")
        try:
            response = requests.post(
                cfg.endpoint_url,
                data=encode_request(request),
                headers={
                    "Authorization": f"Bearer {credential}",
                    "Content-Type": "application/json",
                },
                timeout=cfg.timeout,
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise NetworkError(str(exc)) from None
        if response.status_code in (401, 403):
            raise AuthError(f"credential rejected (HTTP {response.status_code})")
        if response.status_code == 429:
            retry_after = None
            header = response.headers.get("Retry-After")
            if header is not None:
                try:
                    retry_after = float(header)
                except ValueError:
                    pass
            raise RateLimited("rate limited by endpoint", retry_after=retry_after)
        if response.status_code >= 500:
            raise NetworkError(f"endpoint failed with HTTP {response.status_code}")
        if response.status_code != 200:
            raise MalformedResponse(f"unexpected HTTP status {response.status_code}")
        return decode_response(response.content)


class ScriptedBackend:
    """Deterministic backend that replays prepared replies in order.

    Every request is captured in calls_seen for assertions. Replies are
    consumed strictly in order; running out raises ScriptExhausted rather
    than recycling. Internal locking keeps the queue and capture list
    consistent under concurrent use.
    """

    def __init__(self, replies: list[str] | None = None) -> None:
        self._replies: list[str] = list(replies or [])
        self.calls_seen: list[CompletionRequest] = []
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> Message:
        with self._lock:
            self.calls_seen.append(request)
            if not self._replies:
                raise ScriptExhausted("scripted backend has no replies left")
            reply = self._replies.pop(0)
        return Message(Role.AI, reply)

    @property
    def remaining(self) -> int:
        with self._lock:
            return len(self._replies)
