#!/usr/bin/env python3
"""Re-record the wire fixture corpus against a running chat-completions server.

By default this starts the local stub server from tests/chat_stub.py (which
validates every request against the standard chat-completions schema) and
records the exact bytes the HTTP client put on the wire for each case in
tests/fixtures/wire/requests.json. Point --endpoint at any compatible server
to record against a different reference implementation.

Usage:
    python scripts/record_wire_fixtures.py [--check] [--endpoint URL --api-key-env NAME]

--check verifies the recorded bytes against the committed corpus and exits
non-zero on drift instead of rewriting the files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from chat_stub import ChatCompletionsStub  # noqa: E402

from mindguide.messages import Message, parse_role  # noqa: E402
from mindguide.model_client import CompletionRequest, HttpBackend, ModelConfig  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures" / "wire" / "requests.json"
RECORD_KEY_ENV = "MINDGUIDE_RECORD_KEY"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true", help="verify instead of rewrite")
    parser.add_argument("--endpoint", default=None, help="record against this URL")
    parser.add_argument("--api-key-env", default=RECORD_KEY_ENV)
    args = parser.parse_args()

    cases = json.loads(FIXTURES.read_text(encoding="utf-8"))
    stub = None
    if args.endpoint is None:
        stub = ChatCompletionsStub(api_key="record-key").start()
        os.environ[RECORD_KEY_ENV] = "record-key"
        endpoint = stub.url
        key_env = RECORD_KEY_ENV
    else:
        endpoint = args.endpoint
        key_env = args.api_key_env

    backend = HttpBackend()
    drift = 0
    try:
        for index, case in enumerate(cases):
            config = ModelConfig(**case["config"], endpoint_url=endpoint, api_key_env=key_env)
            messages = [Message(parse_role(r), c) for r, c in case["messages"]]
            backend.complete(CompletionRequest(config, messages))
            if stub is not None:
                recorded = stub.requests[index]
                if recorded.schema_error:
                    print(f"{case['name']}: SCHEMA VIOLATION: {recorded.schema_error}")
                    return 1
                body = recorded.body.decode("utf-8")
            else:
                # Remote servers can't hand the bytes back; fall back to the
                # client's own encoding (still schema-checked server-side).
                from mindguide.model_client import encode_request

                body = encode_request(CompletionRequest(config, messages)).decode("utf-8")
            # The fixture freezes the body for the *default* endpoint config;
            # endpoint/api_key_env are transport fields and never serialized.
            if case["expected_body"] != body:
                drift += 1
                print(f"{case['name']}: recorded bytes differ from committed fixture")
                if not args.check:
                    case["expected_body"] = body
            else:
                print(f"{case['name']}: ok")
    finally:
        if stub is not None:
            stub.stop()

    if args.check:
        return 1 if drift else 0
    if drift:
        FIXTURES.write_text(json.dumps(cases, indent=2, ensure_ascii=False) + "\n", "utf-8")
        print(f"rewrote {FIXTURES} ({drift} case(s) updated)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
