"""Role-tagged message model shared by every other layer."""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass


class Role(enum.Enum):
    """Who produced a message: system instructions, the human, or the assistant."""

    SYSTEM = "system"
    HUMAN = "human"
    AI = "ai"


def parse_role(tag: str) -> Role:
    """Map a stored role tag back to a Role. Only the three known tags parse."""
    try:
        return Role(tag)
    except ValueError:
        raise ValueError(f"unknown role tag: {tag!r}") from None


@dataclass(frozen=True)
class Message:
    """One conversation turn: a role plus the verbatim text content.

    Content is stored byte-for-byte; no trimming or normalization happens here.
    Empty content is legal at this layer (the service decides what users may send).
    """

    role: Role
    content: str


class Transcript:
    """Append-only, insertion-ordered container of messages."""

    def __init__(self, messages: Iterable[Message] = ()) -> None:
        self._messages: list[Message] = list(messages)

    @property
    def messages(self) -> tuple[Message, ...]:
        return tuple(self._messages)

    def append(self, message: Message) -> None:
        self._messages.append(message)

    def __len__(self) -> int:
        return len(self._messages)

    def __iter__(self):
        return iter(self._messages)


DEFAULT_LABELS: Mapping[Role, str] = {
    Role.SYSTEM: "System",
    Role.HUMAN: "Human",
    Role.AI: "AI",
}


def format_transcript(
    messages: Iterable[Message],
    labels: Mapping[Role, str] = DEFAULT_LABELS,
) -> str:
    """Render messages as "<label>: <content>" lines joined with newlines.

    Content is inserted verbatim, so embedded newlines stay embedded. An empty
    message list yields the empty string. Raises KeyError if a present role has
    no label.
    """
    lines = []
    for message in messages:
        if message.role not in labels:
            raise KeyError(f"no label for role {message.role}")
        lines.append(f"{labels[message.role]}: {message.content}")
    return "\n".join(lines)
