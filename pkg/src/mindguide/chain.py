"""The chain: one prompt template + one backend + one memory = one turn.

A run executes a fixed sequence: load memory, render the prompt with the
current input, call the model, and only then write the exchange back to
memory. A failing model call therefore leaves memory exactly as it was.
"""

from __future__ import annotations

from dataclasses import dataclass

from .memory import ConversationMemory, MemoryPolicy
from .messages import Message, Role, format_transcript
from .model_client import ChatBackend, CompletionRequest, ModelConfig
from .personas import DEFAULT_INPUT_KEY, Persona
from .prompting import ChatPromptTemplate


class UnboundVariable(Exception):
    """The prompt references a variable the chain will never bind."""

    def __init__(self, name: str) -> None:
        super().__init__(f"prompt variable {name!r} is bound by neither input nor memory")
        self.name = name


@dataclass
class ChainOutput:
    """The AI reply plus the exact message list that was sent, for audit."""

    reply: Message
    rendered_prompt: list[Message]


class Chain:
    """Binds prompt, backend, config, and memory into a single-turn pipeline.

    History handling: by default the visible history is injected as structured
    messages between the leading parts and the final (human) part, preserving
    roles on the wire. If the prompt itself references the memory variable,
    the history is instead bound to it as a formatted string and no structural
    injection happens.

    Runs on one chain must be serialized by the caller; distinct chains are
    independent.
    """

    def __init__(
        self,
        prompt: ChatPromptTemplate,
        backend: ChatBackend,
        config: ModelConfig,
        memory: ConversationMemory,
        input_key: str = DEFAULT_INPUT_KEY,
        output_key: str = "reply",
    ) -> None:
        allowed = {input_key, memory.memory_key}
        unbound = sorted(prompt.variables - allowed)
        if unbound:
            raise UnboundVariable(unbound[0])
        self.prompt = prompt
        self.backend = backend
        self.config = config
        self.memory = memory
        self.input_key = input_key
        self.output_key = output_key

    def run(self, input_text: str) -> ChainOutput:
        """Execute one turn; memory is written only after the model succeeds."""
        history = self.memory.load()[self.memory.memory_key]
        bindings = {self.input_key: input_text}
        inject_structured = self.memory.memory_key not in self.prompt.variables
        if not inject_structured:
            bindings[self.memory.memory_key] = format_transcript(history)
        rendered = self.prompt.render(bindings)
        if inject_structured:
            rendered = rendered[:-1] + history + rendered[-1:]
        reply = self.backend.complete(CompletionRequest(self.config, rendered))
        self.memory.save(input_text, reply.content)
        return ChainOutput(reply=reply, rendered_prompt=rendered)


def build_chain(
    persona: Persona,
    backend: ChatBackend,
    config: ModelConfig,
    policy: MemoryPolicy,
    *,
    memory: ConversationMemory | None = None,
    input_key: str = DEFAULT_INPUT_KEY,
) -> Chain:
    """Construct a validated chain from a persona.

    Fails fast: persona template problems raise PersonaError, and any template
    variable outside {input_key, memory_key} raises UnboundVariable before the
    first run. Pass `memory` to share or preconfigure state (e.g. a stored
    welcome); otherwise a fresh memory is created under `policy`.
    """
    if memory is None:
        memory = ConversationMemory(policy=policy)
    persona.validate(input_key=input_key, memory_key=memory.memory_key)
    prompt = ChatPromptTemplate.from_sources(
        [(Role.SYSTEM, persona.system_template), (Role.HUMAN, persona.human_template)]
    )
    return Chain(
        prompt=prompt,
        backend=backend,
        config=config,
        memory=memory,
        input_key=input_key,
    )
