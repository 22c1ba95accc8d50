"""Session-scoped HTTP chat service with durable per-session transcripts.

Sessions live in memory and expire after an idle TTL; their transcripts are
JSONL files that survive session deletion and process restarts (sessions are
not resurrected; transcripts exist for audit and replay). Within a session,
message handling is serialized: a second message arriving while one is in
flight is rejected as busy rather than queued.
"""

from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .chain import Chain, build_chain
from .memory import ConversationMemory, MemoryPolicy
from .messages import Message, Role
from .model_client import ChatBackend, HttpBackend, ModelConfig, ModelError
from .personas import DEFAULT_PERSONA_ID, Persona, load_personas
from .transcript_store import TranscriptWriter

logger = logging.getLogger(__name__)

DEFAULT_SESSION_TTL = 3600.0


class ServiceError(Exception):
    """Base for request-level failures; `code` is the wire error code."""

    code = "service_error"
    http_status = 500


class UnknownSession(ServiceError):
    code = "unknown_session"
    http_status = 404


class UnknownPersona(ServiceError):
    code = "unknown_persona"
    http_status = 404


class EmptyMessage(ServiceError):
    code = "empty_message"
    http_status = 400


class SessionBusy(ServiceError):
    code = "session_busy"
    http_status = 409


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    model: ModelConfig = field(default_factory=ModelConfig)
    policy: MemoryPolicy = field(default_factory=MemoryPolicy.buffer)
    persona_dir: Path | None = None
    transcript_dir: Path = Path("transcripts")
    session_ttl: float = DEFAULT_SESSION_TTL
    webui_dir: Path | None = None

    @classmethod
    def from_mapping(cls, data: dict) -> "ServiceConfig":
        """Build a config from a parsed JSON document; unknown keys are errors."""
        known = {
            "host", "port", "model", "memory", "persona_dir", "transcript_dir",
            "session_ttl", "webui_dir",
        }
        unknown = data.keys() - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict = {}
        for key in ("host", "port", "session_ttl"):
            if key in data:
                kwargs[key] = data[key]
        for key in ("persona_dir", "transcript_dir", "webui_dir"):
            if key in data and data[key] is not None:
                kwargs[key] = Path(data[key])
        if "model" in data:
            kwargs["model"] = ModelConfig(**data["model"])
        if "memory" in data:
            mem = data["memory"]
            if mem.get("policy") == "window":
                kwargs["policy"] = MemoryPolicy.windowed(int(mem["k"]))
            elif mem.get("policy") in (None, "buffer"):
                kwargs["policy"] = MemoryPolicy.buffer()
            else:
                raise ValueError(f"unknown memory policy {mem.get('policy')!r}")
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: Path) -> "ServiceConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        return cls.from_mapping(data)


@dataclass
class Session:
    id: str
    persona_id: str
    chain: Chain
    created_at: float
    last_active: float
    transcript_path: Path
    writer: TranscriptWriter
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionManager:
    """Owns the live session map; every operation the HTTP layer exposes.

    `clock` is injectable for TTL tests. Expired sessions are evicted lazily
    on lookup, so no background reaper thread is needed.
    """

    def __init__(
        self,
        config: ServiceConfig | None = None,
        backend: ChatBackend | None = None,
        clock=time.monotonic,
    ) -> None:
        self.config = config if config is not None else ServiceConfig()
        self.backend = backend if backend is not None else HttpBackend()
        self._clock = clock
        self._personas: dict[str, Persona] = load_personas(self.config.persona_dir)
        self._sessions: dict[str, Session] = {}
        self._map_lock = threading.RLock()
        Path(self.config.transcript_dir).mkdir(parents=True, exist_ok=True)

    def persona(self, persona_id: str) -> Persona:
        try:
            return self._personas[persona_id]
        except KeyError:
            raise UnknownPersona(f"no persona with id {persona_id!r}") from None

    def create_session(self, persona_id: str | None = None) -> tuple[str, Message]:
        """New session with fresh memory seeded by the persona's welcome."""
        persona = self.persona(persona_id or DEFAULT_PERSONA_ID)
        welcome = Message(Role.AI, persona.welcome)
        memory = ConversationMemory(policy=self.config.policy, preamble=welcome)
        chain = build_chain(
            persona, self.backend, self.config.model, self.config.policy, memory=memory
        )
        session_id = uuid.uuid4().hex
        transcript_path = Path(self.config.transcript_dir) / f"{session_id}.jsonl"
        writer = TranscriptWriter(transcript_path)
        writer.write(welcome)
        now = self._clock()
        session = Session(
            id=session_id,
            persona_id=persona.id,
            chain=chain,
            created_at=now,
            last_active=now,
            transcript_path=transcript_path,
            writer=writer,
        )
        with self._map_lock:
            self._sessions[session_id] = session
        logger.info("created session %s (persona %s)", session_id, persona.id)
        return session_id, welcome

    def _get(self, session_id: str) -> Session:
        with self._map_lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSession(f"no session with id {session_id!r}")
            if self._clock() - session.last_active > self.config.session_ttl:
                self._sessions.pop(session_id, None)
                session.writer.close()
                logger.info("session %s expired", session_id)
                raise UnknownSession(f"session {session_id!r} has expired")
            return session

    def post_message(self, session_id: str, content: str) -> Message:
        """Run the session's chain once; transcript gets the exchange on success."""
        session = self._get(session_id)
        if not content.strip():
            raise EmptyMessage("message content is empty")
        if not session.lock.acquire(blocking=False):
            raise SessionBusy(f"session {session_id!r} already has a message in flight")
        try:
            output = session.chain.run(content)
            session.writer.write(Message(Role.HUMAN, content))
            session.writer.write(output.reply)
            session.last_active = self._clock()
            return output.reply
        finally:
            session.lock.release()

    def get_history(self, session_id: str) -> list[Message]:
        """Welcome plus every exchange, flattened, regardless of memory policy."""
        session = self._get(session_id)
        session.last_active = self._clock()
        return session.chain.memory.all_messages()

    def delete_session(self, session_id: str) -> None:
        """Forget the session; its transcript file stays on disk."""
        session = self._get(session_id)
        with self._map_lock:
            self._sessions.pop(session_id, None)
        session.writer.close()
        logger.info("deleted session %s", session_id)

    def close(self) -> None:
        with self._map_lock:
            for session in self._sessions.values():
                session.writer.close()
            self._sessions.clear()


class _PostMessageBody(BaseModel):
    content: str


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def _message_json(message: Message) -> dict:
    return {"role": message.role.value, "content": message.content}


def create_app(manager: SessionManager) -> FastAPI:
    """HTTP/JSON API over a session manager, plus static hosting of the web UI."""
    app = FastAPI(title="mindguide")

    @app.exception_handler(ServiceError)
    async def _service_error(_request: Request, exc: ServiceError):
        return _error_response(exc.http_status, exc.code, str(exc))

    @app.exception_handler(ModelError)
    async def _model_error(_request: Request, exc: ModelError):
        return _error_response(502, "upstream_error", f"{type(exc).__name__}: {exc}")

    @app.post("/api/sessions", status_code=201)
    def create_session(body: dict | None = None):
        persona_id = (body or {}).get("persona_id")
        session_id, welcome = manager.create_session(persona_id)
        return {"session_id": session_id, "welcome": _message_json(welcome)}

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: _PostMessageBody):
        reply = manager.post_message(session_id, body.content)
        return {"reply": _message_json(reply)}

    @app.get("/api/sessions/{session_id}/history")
    def get_history(session_id: str):
        messages = manager.get_history(session_id)
        return {"messages": [_message_json(m) for m in messages]}

    @app.delete("/api/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        manager.delete_session(session_id)
        return Response(status_code=204)

    webui_dir = manager.config.webui_dir
    if webui_dir is not None and Path(webui_dir).is_dir():
        app.mount("/", StaticFiles(directory=webui_dir, html=True), name="webui")

    return app
