"""Shared fixtures: scripted chains, a configured service, the wire stub."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from mindguide.memory import ConversationMemory, MemoryPolicy
from mindguide.messages import Message, Role
from mindguide.model_client import ModelConfig, ScriptedBackend
from mindguide.chain import build_chain
from mindguide.personas import builtin_personas
from mindguide.service import ServiceConfig, SessionManager

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "wire"


def load_wire_fixtures(name: str) -> list[dict]:
    return json.loads((FIXTURE_DIR / name).read_text(encoding="utf-8"))


@pytest.fixture
def persona():
    return builtin_personas()["mindguide"]


@pytest.fixture
def scripted_chain(persona):
    """Factory: a chain over a scripted backend, optionally with the welcome stored."""

    def _factory(replies, policy=None, with_welcome=False):
        policy = policy or MemoryPolicy.buffer()
        backend = ScriptedBackend(replies)
        memory = ConversationMemory(
            policy=policy,
            preamble=Message(Role.AI, persona.welcome) if with_welcome else None,
        )
        chain = build_chain(persona, backend, ModelConfig(), policy, memory=memory)
        return chain, backend

    return _factory


@pytest.fixture
def manager_factory(tmp_path):
    """Factory: a SessionManager wired to a scripted backend and tmp transcripts."""
    managers = []

    def _factory(replies, policy=None, clock=None, ttl=None, webui_dir=None):
        config = ServiceConfig(
            policy=policy or MemoryPolicy.buffer(),
            transcript_dir=tmp_path / "transcripts",
        )
        if ttl is not None:
            config.session_ttl = ttl
        if webui_dir is not None:
            config.webui_dir = webui_dir
        kwargs = {"backend": ScriptedBackend(replies)}
        if clock is not None:
            kwargs["clock"] = clock
        manager = SessionManager(config, **kwargs)
        managers.append(manager)
        return manager

    yield _factory
    for manager in managers:
        manager.close()
