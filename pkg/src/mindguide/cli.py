"""Command line entry point: serve the HTTP API, chat in a REPL, replay transcripts.

Exit codes: 0 success, 1 replay mismatch, 2 usage or parse error,
3 environment error (e.g. port already bound).
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import socket
import sys
from pathlib import Path

from .chain import build_chain
from .memory import ConversationMemory
from .messages import Message, Role, format_transcript
from .model_client import HttpBackend, ModelError, ScriptedBackend
from .personas import DEFAULT_PERSONA_ID, PersonaError, load_personas
from .service import ServiceConfig, SessionManager, create_app
from .transcript_store import TranscriptError, TranscriptWriter, read_transcript, split_conversation

CONFIG_ENV = "MINDGUIDE_CONFIG"


def _load_config(path: str | None) -> ServiceConfig:
    """Config file from --config, then the environment, then defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path is None:
        return ServiceConfig()
    return ServiceConfig.from_file(Path(path))


def _load_script(path: str) -> list[str]:
    """A script file is a JSON array of reply strings."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise ValueError("script file must hold a JSON array of strings")
    return data


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    try:
        config = _load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return 2
    if args.port is not None:
        config.port = args.port
    if args.host is not None:
        config.host = args.host

    # Probe the bind up front so a taken port is a clean diagnostic, not a traceback.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.host, config.port))
    except OSError as exc:
        print(f"cannot bind {config.host}:{config.port}: {exc}", file=sys.stderr)
        return 3
    finally:
        probe.close()

    manager = SessionManager(config)
    app = create_app(manager)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    finally:
        manager.close()
    return 0


def _build_cli_chain(args: argparse.Namespace, replies: list[str] | None):
    config = _load_config(getattr(args, "config", None))
    personas = load_personas(config.persona_dir if args.persona_dir is None else Path(args.persona_dir))
    persona_id = args.persona or DEFAULT_PERSONA_ID
    if persona_id not in personas:
        raise PersonaError(f"no persona with id {persona_id!r}")
    persona = personas[persona_id]
    backend = ScriptedBackend(replies) if replies is not None else HttpBackend()
    welcome = Message(Role.AI, persona.welcome)
    memory = ConversationMemory(policy=config.policy, preamble=welcome)
    chain = build_chain(persona, backend, config.model, config.policy, memory=memory)
    return chain, welcome


def cmd_chat(args: argparse.Namespace) -> int:
    replies = None
    if args.backend == "scripted":
        if args.script is None:
            print("--backend scripted requires --script PATH", file=sys.stderr)
            return 2
        try:
            replies = _load_script(args.script)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            print(f"bad script: {exc}", file=sys.stderr)
            return 2
    try:
        chain, welcome = _build_cli_chain(args, replies)
    except (OSError, ValueError, PersonaError) as exc:
        print(f"cannot start chat: {exc}", file=sys.stderr)
        return 2

    writer = TranscriptWriter(Path(args.transcript)) if args.transcript else None
    if writer:
        writer.write(welcome)
    print(welcome.content)

    interactive = sys.stdin.isatty()
    try:
        while True:
            if interactive:
                print("you> ", end="", flush=True)
            try:
                line = input()
            except EOFError:
                break
            command = line.strip()
            if command == "/quit":
                break
            if command == "/history":
                print(format_transcript(chain.memory.all_messages()))
                continue
            if not command:
                continue
            try:
                output = chain.run(line)
            except ModelError as exc:
                print(f"error: {exc}", file=sys.stderr)
                continue
            if writer:
                writer.write(Message(Role.HUMAN, line))
                writer.write(output.reply)
            print(output.reply.content)
    finally:
        if writer:
            writer.close()
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        records = read_transcript(Path(args.transcript))
        welcome, pairs = split_conversation(records)
    except TranscriptError as exc:
        print(f"bad transcript: {exc}", file=sys.stderr)
        return 2
    try:
        script = _load_script(args.script)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"bad script: {exc}", file=sys.stderr)
        return 2
    if len(script) != len(pairs):
        print(
            f"script has {len(script)} replies but transcript has {len(pairs)} human turns",
            file=sys.stderr,
        )
        return 2
    try:
        chain, _ = _build_cli_chain(args, script)
    except (OSError, ValueError, PersonaError) as exc:
        print(f"cannot replay: {exc}", file=sys.stderr)
        return 2
    chain.memory.preamble = welcome

    expected = [ai.content for _, ai in pairs]
    actual = [chain.run(human.content).reply.content for human, _ in pairs]
    if actual == expected:
        print(f"replay ok: {len(pairs)} turns match")
        return 0
    for index, (want, got) in enumerate(zip(expected, actual)):
        if want != got:
            print(f"turn {index}: reply mismatch")
    diff = difflib.unified_diff(
        [f"turn {i}: {text}" for i, text in enumerate(expected)],
        [f"turn {i}: {text}" for i, text in enumerate(actual)],
        fromfile="transcript",
        tofile="replay",
        lineterm="",
    )
    for line in diff:
        print(line)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mindguide")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP chat service")
    serve.add_argument("--config", help="path to a JSON config file")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(func=cmd_serve)

    chat = sub.add_parser("chat", help="chat with a persona in the terminal")
    chat.add_argument("--config", help="path to a JSON config file")
    chat.add_argument("--persona", default=None, help="persona id (default mindguide)")
    chat.add_argument("--persona-dir", default=None, help="directory of persona JSON files")
    chat.add_argument(
        "--backend", choices=("remote", "scripted"), default="remote",
        help="remote chat-completions endpoint or a scripted reply file",
    )
    chat.add_argument("--script", default=None, help="JSON array of scripted replies")
    chat.add_argument("--transcript", default=None, help="write the conversation to this JSONL file")
    chat.set_defaults(func=cmd_chat)

    replay = sub.add_parser("replay", help="re-run a transcript against a scripted backend")
    replay.add_argument("transcript", help="JSONL transcript to replay")
    replay.add_argument("--script", required=True, help="JSON array of scripted replies")
    replay.add_argument("--config", help="path to a JSON config file")
    replay.add_argument("--persona", default=None)
    replay.add_argument("--persona-dir", default=None)
    replay.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
