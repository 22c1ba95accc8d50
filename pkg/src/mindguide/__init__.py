"""Conversational-LLM orchestration stack with a mental-health assistant persona.

The pieces compose bottom-up: role-tagged messages, a strict prompt template
engine, chat-model backends (remote HTTP and scripted), read-before/write-after
session memory, and the chain that ties one turn together. On top of the
library sit an HTTP chat service, a CLI, and a web client.
"""

from .chain import Chain, ChainOutput, UnboundVariable, build_chain
from .memory import ConversationMemory, Exchange, MemoryPolicy
from .messages import DEFAULT_LABELS, Message, Role, Transcript, format_transcript, parse_role
from .model_client import (
    AuthError,
    ChatBackend,
    CompletionRequest,
    HttpBackend,
    MalformedResponse,
    ModelConfig,
    ModelError,
    NetworkError,
    RateLimited,
    ScriptedBackend,
    ScriptExhausted,
    decode_response,
    encode_request,
)
from .personas import DEFAULT_PERSONA_ID, Persona, PersonaError, load_personas
from .prompting import (
    ChatPromptTemplate,
    MessageTemplate,
    MissingVariable,
    PromptTemplate,
    TemplateError,
    TemplateSyntaxError,
    parse_template,
)
from .service import ServiceConfig, SessionManager, create_app

__all__ = [
    "AuthError",
    "Chain",
    "ChainOutput",
    "ChatBackend",
    "ChatPromptTemplate",
    "CompletionRequest",
    "ConversationMemory",
    "DEFAULT_LABELS",
    "DEFAULT_PERSONA_ID",
    "Exchange",
    "HttpBackend",
    "MalformedResponse",
    "MemoryPolicy",
    "Message",
    "MessageTemplate",
    "MissingVariable",
    "ModelConfig",
    "ModelError",
    "NetworkError",
    "Persona",
    "PersonaError",
    "PromptTemplate",
    "RateLimited",
    "Role",
    "ScriptExhausted",
    "ScriptedBackend",
    "ServiceConfig",
    "SessionManager",
    "TemplateError",
    "TemplateSyntaxError",
    "Transcript",
    "UnboundVariable",
    "build_chain",
    "create_app",
    "decode_response",
    "encode_request",
    "format_transcript",
    "load_personas",
    "parse_role",
    "parse_template",
]
