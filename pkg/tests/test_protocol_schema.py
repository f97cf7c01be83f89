"""Every message crossing the console protocol validates against the shared
schema file (the same file the browser console ships with)."""

import json
import time
from pathlib import Path

import pytest

jsonschema = pytest.importorskip("jsonschema")

from hivekit.registry import EnvRegistry, register_builtin
from hivekit.teleop import HeadlessConsole, TeleopServer

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "docs/schemas/console_protocol.schema.json"


@pytest.fixture(scope="module")
def validator():
    schema = json.loads(SCHEMA_PATH.read_text())
    return jsonschema.Draft7Validator(schema)


def test_cli_reports_validate_against_their_schemas(tmp_path, capsys):
    from hivekit.cli import main

    schema_dir = SCHEMA_PATH.parent
    bench_schema = json.loads((schema_dir / "bench_report.schema.json").read_text())
    eval_schema = json.loads((schema_dir / "eval_report.schema.json").read_text())

    assert main(["bench", "--env", "reach-v0", "--steps", "200", "--json"]) == 0
    jsonschema.validate(json.loads(capsys.readouterr().out), bench_schema)

    assert main(["eval", "--env", "pendulum-v0", "--policy", "expert",
                 "--episodes", "1", "--json"]) == 0
    jsonschema.validate(json.loads(capsys.readouterr().out), eval_schema)


def test_gateway_traffic_validates(validator):
    reg = EnvRegistry()
    register_builtin(reg)
    cfg = reg.config("reach-v0")
    server = TeleopServer(cfg, rate_hz=20.0).start()
    try:
        console = HeadlessConsole(server.host, server.port)
        console.record("start")
        console.send_key("j0+", True)
        console.send_axis("a1", 0.5)
        deadline = time.monotonic() + 3
        while time.monotonic() < deadline:
            console.next_scene(timeout=2)
        console.send_key("j0+", False)
        console.record("stop")
        console.reset()
        console.next_scene(timeout=2)

        messages = (
            [console.hello]
            + console.scenes
            + console.episodes
            + console.records
            + console.errors
        )
        assert len(messages) > 40
        for msg in messages:
            validator.validate(msg)
        console.close()
    finally:
        server.stop()


def test_client_messages_validate(validator):
    # the exact message shapes the headless console (and the browser) emits
    samples = [
        {"type": "hello", "want": "control"},
        {"type": "input", "kind": "keydown", "code": "j0+"},
        {"type": "input", "kind": "keyup", "code": "j0+"},
        {"type": "input", "kind": "axis", "code": "a0", "value": -0.25},
        {"type": "record", "action": "start"},
        {"type": "record", "action": "stop"},
        {"type": "reset"},
    ]
    for msg in samples:
        validator.validate(msg)
    with pytest.raises(jsonschema.ValidationError):
        validator.validate({"type": "input", "kind": "axis", "code": "a0"})  # missing value
