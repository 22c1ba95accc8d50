#!/usr/bin/env python3
"""Run the chat service with a scripted backend; no credential or network needed.

Useful for driving the web UI or API clients deterministically:

    python scripts/run_scripted_service.py --port 8080 --script replies.json [--loop]

The script file is a JSON array of reply strings. With --loop the replies
cycle forever instead of exhausting.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
from pathlib import Path

import uvicorn

from mindguide.messages import Message, Role
from mindguide.model_client import ScriptedBackend
from mindguide.service import ServiceConfig, SessionManager, create_app


class LoopingBackend:
    """ScriptedBackend variant that cycles its replies forever."""

    def __init__(self, replies: list[str]) -> None:
        self._replies = list(replies)
        self._index = 0
        self._lock = threading.Lock()

    def complete(self, request) -> Message:
        with self._lock:
            reply = self._replies[self._index % len(self._replies)]
            self._index += 1
        return Message(Role.AI, reply)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--script", required=True, help="JSON array of reply strings")
    parser.add_argument("--loop", action="store_true", help="cycle replies forever")
    parser.add_argument("--transcript-dir", default="transcripts")
    parser.add_argument("--webui-dir", default=None)
    args = parser.parse_args()

    replies = json.loads(Path(args.script).read_text(encoding="utf-8"))
    if not isinstance(replies, list) or not all(isinstance(r, str) for r in replies):
        print("script file must hold a JSON array of strings", file=sys.stderr)
        return 2
    if args.loop and not replies:
        print("--loop needs at least one reply", file=sys.stderr)
        return 2

    backend = LoopingBackend(replies) if args.loop else ScriptedBackend(replies)
    config = ServiceConfig(
        host=args.host,
        port=args.port,
        transcript_dir=Path(args.transcript_dir),
        webui_dir=Path(args.webui_dir) if args.webui_dir else None,
    )
    manager = SessionManager(config, backend=backend)
    try:
        uvicorn.run(create_app(manager), host=config.host, port=config.port, log_level="warning")
    finally:
        manager.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
