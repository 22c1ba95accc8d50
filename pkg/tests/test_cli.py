from __future__ import annotations

import json
import os
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
import requests

from chat_stub import ChatCompletionsStub, StubBehavior, chat_response_body
from mindguide.cli import main
from mindguide.personas import builtin_personas
from mindguide.transcript_store import read_transcript

WELCOME = builtin_personas()["mindguide"].welcome


def _write_script(tmp_path: Path, replies: list[str]) -> Path:
    path = tmp_path / "script.json"
    path.write_text(json.dumps(replies), encoding="utf-8")
    return path


def _run_chat(tmp_path, replies, stdin_text, extra_args=()):
    script = _write_script(tmp_path, replies)
    result = subprocess.run(
        [sys.executable, "-m", "mindguide.cli", "chat", "--backend", "scripted",
         "--script", str(script), *extra_args],
        input=stdin_text,
        capture_output=True,
        text=True,
        timeout=60,
    )
    return result


def test_chat_prints_welcome_then_scripted_reply(tmp_path):
    result = _run_chat(tmp_path, ["ok"], "hi\n")
    assert result.returncode == 0
    assert result.stdout == WELCOME + "\nok\n"


def test_chat_immediate_eof_prints_welcome_only(tmp_path):
    result = _run_chat(tmp_path, ["unused"], "")
    assert result.returncode == 0
    assert result.stdout == WELCOME + "\n"


def test_chat_quit_command(tmp_path):
    result = _run_chat(tmp_path, ["unused"], "/quit\n")
    assert result.returncode == 0
    assert result.stdout == WELCOME + "\n"


def test_chat_model_error_keeps_loop_alive(tmp_path):
    result = _run_chat(tmp_path, ["only"], "one\ntwo\nthree\n")
    assert result.returncode == 0
    assert result.stdout == WELCOME + "\nonly\n"
    assert "error:" in result.stderr


def test_chat_history_command(tmp_path):
    result = _run_chat(tmp_path, ["sure"], "hello\n/history\n")
    assert result.returncode == 0
    lines = result.stdout.splitlines()
    assert lines[-3] == f"AI: {WELCOME}"
    assert lines[-2] == "Human: hello"
    assert lines[-1] == "AI: sure"


def test_chat_scripted_requires_script(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "mindguide.cli", "chat", "--backend", "scripted"],
        input="",
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode == 2


def test_chat_unknown_persona_fails_cleanly(tmp_path):
    script = _write_script(tmp_path, ["x"])
    result = subprocess.run(
        [sys.executable, "-m", "mindguide.cli", "chat", "--backend", "scripted",
         "--script", str(script), "--persona", "ghost"],
        input="",
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode == 2


def test_chat_transcript_then_replay_round_trip(tmp_path):
    transcript = tmp_path / "conversation.jsonl"
    result = _run_chat(
        tmp_path, ["first", "second"], "one\ntwo\n", extra_args=("--transcript", str(transcript))
    )
    assert result.returncode == 0
    records = read_transcript(transcript)
    assert [r.message.role.value for r in records] == ["ai", "human", "ai", "human", "ai"]

    script = _write_script(tmp_path, ["first", "second"])
    assert main(["replay", str(transcript), "--script", str(script)]) == 0


def test_replay_detects_altered_reply(tmp_path, capsys):
    transcript = tmp_path / "conversation.jsonl"
    _run_chat(tmp_path, ["first", "second"], "one\ntwo\n",
              extra_args=("--transcript", str(transcript)))
    script = _write_script(tmp_path, ["first", "DIFFERENT"])
    assert main(["replay", str(transcript), "--script", str(script)]) == 1
    out = capsys.readouterr().out
    assert "turn 1" in out


def test_replay_script_count_mismatch(tmp_path):
    transcript = tmp_path / "conversation.jsonl"
    _run_chat(tmp_path, ["first"], "one\n", extra_args=("--transcript", str(transcript)))
    script = _write_script(tmp_path, ["first", "extra"])
    assert main(["replay", str(transcript), "--script", str(script)]) == 2


def test_replay_truncated_transcript(tmp_path):
    transcript = tmp_path / "broken.jsonl"
    _run_chat(tmp_path, ["first"], "one\n", extra_args=("--transcript", str(transcript)))
    lines = transcript.read_text().strip().split("\n")
    transcript.write_text("\n".join(lines[:-1]) + "\n")  # drop the final AI reply
    script = _write_script(tmp_path, ["first"])
    assert main(["replay", str(transcript), "--script", str(script)]) == 2


def test_replay_unparseable_transcript(tmp_path):
    transcript = tmp_path / "junk.jsonl"
    transcript.write_text("this is not json\n")
    script = _write_script(tmp_path, [])
    assert main(["replay", str(transcript), "--script", str(script)]) == 2


def test_chat_and_service_replies_are_identical(tmp_path, manager_factory):
    """The chain is the single source of behavior: for the same persona,
    script, and inputs, the REPL and the HTTP service answer identically."""
    script = ["reply one", "reply two", "reply three"]
    inputs = ["first question", "second question", "third question"]

    result = _run_chat(tmp_path, script, "".join(line + "\n" for line in inputs))
    assert result.returncode == 0
    chat_replies = result.stdout.splitlines()[1:]  # welcome line first

    manager = manager_factory(list(script))
    session_id, _ = manager.create_session()
    service_replies = [manager.post_message(session_id, line).content for line in inputs]

    assert chat_replies == service_replies == script


def test_serve_reports_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["serve", "--config", str(bad)]) == 2


def test_serve_reports_occupied_port(capsys):
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    blocker.listen(1)
    port = blocker.getsockname()[1]
    try:
        assert main(["serve", "--port", str(port), "--host", "127.0.0.1"]) == 3
    finally:
        blocker.close()


def _free_port() -> int:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


@pytest.mark.slow
def test_serve_end_to_end_with_clean_shutdown(tmp_path):
    """Full process test: serve against a stub endpoint, chat, SIGINT, audit."""
    stub = ChatCompletionsStub(
        [StubBehavior(body=chat_response_body("You are heard."))], api_key="serve-key"
    ).start()
    port = _free_port()
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps(
            {
                "host": "127.0.0.1",
                "port": port,
                "model": {"endpoint_url": stub.url, "api_key_env": "MINDGUIDE_SERVE_KEY"},
                "transcript_dir": str(tmp_path / "transcripts"),
            }
        )
    )
    env = dict(os.environ, MINDGUIDE_SERVE_KEY="serve-key")
    process = subprocess.Popen(
        [sys.executable, "-m", "mindguide.cli", "serve", "--config", str(config_path)],
        env=env,
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
    )
    base = f"http://127.0.0.1:{port}"
    try:
        deadline = time.time() + 30
        session_id = None
        while time.time() < deadline:
            try:
                response = requests.post(f"{base}/api/sessions", timeout=5)
                session_id = response.json()["session_id"]
                break
            except requests.ConnectionError:
                time.sleep(0.2)
        assert session_id, "service never came up"
        reply = requests.post(
            f"{base}/api/sessions/{session_id}/messages",
            json={"content": "I feel overwhelmed"},
            timeout=10,
        ).json()["reply"]
        assert reply["content"] == "You are heard."

        process.send_signal(signal.SIGINT)
        assert process.wait(timeout=30) == 0

        records = read_transcript(tmp_path / "transcripts" / f"{session_id}.jsonl")
        assert [r.message.role.value for r in records] == ["ai", "human", "ai"]
    finally:
        if process.poll() is None:
            process.kill()
        stub.stop()
