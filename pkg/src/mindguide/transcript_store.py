"""Append-only JSONL transcripts: one JSON object per message, flushed per line.

Record shape: {"ts": RFC3339 timestamp, "role": "system"|"human"|"ai",
"content": text}. The format is crash-tolerant (a partial file is still a
valid prefix) and replayable: feeding a session transcript back through a
fresh memory reconstructs the same state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .memory import ConversationMemory
from .messages import Message, Role, parse_role


class TranscriptError(Exception):
    """Transcript file is unreadable, malformed, or structurally invalid."""


def _now_rfc3339() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def message_record(message: Message, ts: str | None = None) -> dict:
    """The JSON-serializable record for one message."""
    return {
        "ts": ts if ts is not None else _now_rfc3339(),
        "role": message.role.value,
        "content": message.content,
    }


@dataclass(frozen=True)
class TranscriptRecord:
    ts: str
    message: Message


def parse_record(line: str) -> TranscriptRecord:
    """Parse one JSONL line back into a timestamped message."""
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TranscriptError(f"bad transcript line: {exc}") from None
    if not isinstance(data, dict):
        raise TranscriptError("transcript line is not a JSON object")
    try:
        role = parse_role(data["role"])
        content = data["content"]
        ts = data["ts"]
    except (KeyError, ValueError) as exc:
        raise TranscriptError(f"bad transcript record: {exc}") from None
    if not isinstance(content, str) or not isinstance(ts, str):
        raise TranscriptError("transcript ts and content must be strings")
    return TranscriptRecord(ts=ts, message=Message(role, content))


class TranscriptWriter:
    """Appends messages to a JSONL file, flushing after every record."""

    def __init__(self, path: Path) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.path, "a", encoding="utf-8")

    def write(self, message: Message) -> None:
        line = json.dumps(message_record(message), ensure_ascii=False)
        self._handle.write(line + "\n")
        self._handle.flush()

    def close(self) -> None:
        self._handle.close()

    def __enter__(self) -> "TranscriptWriter":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def read_transcript(path: Path) -> list[TranscriptRecord]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TranscriptError(f"cannot read transcript {path}: {exc}") from None
    records = []
    # Split on real newlines only: JSON escapes \n inside strings, but leaves
    # exotic separators like U+2028 literal, and splitlines() would cut those.
    for line in text.split("\n"):
        if line.strip():
            records.append(parse_record(line))
    return records


def split_conversation(
    records: list[TranscriptRecord],
) -> tuple[Message | None, list[tuple[Message, Message]]]:
    """Split records into an optional leading AI welcome plus (human, ai) pairs.

    Raises TranscriptError on anything that is not welcome-then-alternation,
    including a trailing human message with no reply (a truncated file).
    """
    messages = [r.message for r in records]
    welcome: Message | None = None
    if messages and messages[0].role is Role.AI:
        welcome = messages[0]
        messages = messages[1:]
    pairs: list[tuple[Message, Message]] = []
    if len(messages) % 2 != 0:
        raise TranscriptError("transcript is truncated: human message without a reply")
    for human, ai in zip(messages[0::2], messages[1::2]):
        if human.role is not Role.HUMAN or ai.role is not Role.AI:
            raise TranscriptError(
                f"transcript does not alternate human/ai (got {human.role.value}, {ai.role.value})"
            )
        pairs.append((human, ai))
    return welcome, pairs


def replay_into_memory(records: list[TranscriptRecord], memory: ConversationMemory) -> None:
    """Rebuild memory state from a transcript: welcome becomes the preamble."""
    welcome, pairs = split_conversation(records)
    memory.preamble = welcome
    memory.clear()
    for human, ai in pairs:
        memory.save(human.content, ai.content)
