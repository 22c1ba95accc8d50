"""Session memory: read before the model call, write after it.

Storage and querying are deliberately separate. The memory always stores the
full exchange history; the policy only decides how much of it is *visible* on
load. Window(k) therefore never truncates storage, which keeps transcripts
complete while the model sees just the last k exchanges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .messages import Message, Role
from .prompting import is_identifier

DEFAULT_MEMORY_KEY = "history"


@dataclass(frozen=True)
class Exchange:
    """One interaction: a human message paired with its AI reply."""

    human: Message
    ai: Message

    def __post_init__(self) -> None:
        if self.human.role is not Role.HUMAN:
            raise ValueError(f"exchange.human has role {self.human.role}")
        if self.ai.role is not Role.AI:
            raise ValueError(f"exchange.ai has role {self.ai.role}")


@dataclass(frozen=True)
class MemoryPolicy:
    """Visibility rule for load: full buffer, or only the last k exchanges."""

    window: int | None = None

    def __post_init__(self) -> None:
        if self.window is not None and self.window < 1:
            raise ValueError("window size must be at least 1")

    @classmethod
    def buffer(cls) -> "MemoryPolicy":
        return cls(window=None)

    @classmethod
    def windowed(cls, k: int) -> "MemoryPolicy":
        return cls(window=k)


class ConversationMemory:
    """Per-session exchange store with an optional stored welcome message.

    The welcome (preamble) is an AI message the assistant is considered to
    have already said, so it is included in what load() exposes and survives
    clear(). Instances are confined to one session's worker; cross-session
    concurrency uses independent instances.
    """

    def __init__(
        self,
        policy: MemoryPolicy | None = None,
        memory_key: str = DEFAULT_MEMORY_KEY,
        preamble: Message | None = None,
    ) -> None:
        if not is_identifier(memory_key):
            raise ValueError(f"memory key {memory_key!r} is not a valid identifier")
        if preamble is not None and preamble.role is not Role.AI:
            raise ValueError("preamble must be an AI message")
        self.policy = policy if policy is not None else MemoryPolicy.buffer()
        self.memory_key = memory_key
        self.preamble = preamble
        self._exchanges: list[Exchange] = []

    @property
    def exchanges(self) -> tuple[Exchange, ...]:
        """Everything ever saved, in insertion order, regardless of policy."""
        return tuple(self._exchanges)

    def visible_messages(self) -> list[Message]:
        """Preamble (if any) followed by the policy-visible exchanges, flattened."""
        if self.policy.window is None:
            window = self._exchanges
        else:
            window = self._exchanges[-self.policy.window :]
        messages: list[Message] = [] if self.preamble is None else [self.preamble]
        for exchange in window:
            messages.append(exchange.human)
            messages.append(exchange.ai)
        return messages

    def all_messages(self) -> list[Message]:
        """Preamble (if any) followed by every stored exchange, flattened."""
        messages: list[Message] = [] if self.preamble is None else [self.preamble]
        for exchange in self._exchanges:
            messages.append(exchange.human)
            messages.append(exchange.ai)
        return messages

    def load(self) -> dict[str, list[Message]]:
        """Read step: the visible history under this memory's key.

        Returns a fresh list each call; loading never mutates state.
        """
        return {self.memory_key: self.visible_messages()}

    def save(self, input_text: str, output_text: str) -> None:
        """Write step: append one exchange. Prior exchanges are untouched."""
        self._exchanges.append(
            Exchange(Message(Role.HUMAN, input_text), Message(Role.AI, output_text))
        )

    def clear(self) -> None:
        """Drop all exchanges; the preamble is retained. Idempotent."""
        self._exchanges.clear()
