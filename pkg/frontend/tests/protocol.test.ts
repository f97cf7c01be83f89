// Protocol conformance: every message the console emits validates against
// the shared schema file the gateway ships; server-message parsing is
// tolerant of malformed input.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  axisMessage,
  helloMessage,
  keyMessage,
  parseServerMessage,
  recordMessage,
  resetMessage,
} from "../src/protocol.js";
import { MiniValidator } from "./minischema.js";

const here = dirname(fileURLToPath(import.meta.url));
const schemaPath = join(here, "../../docs/schemas/console_protocol.schema.json");
const validator = new MiniValidator(JSON.parse(readFileSync(schemaPath, "utf-8")));

describe("emitted client messages", () => {
  it("all validate against the shared gateway schema", () => {
    const samples = [
      helloMessage("control"),
      helloMessage("spectate"),
      keyMessage("keydown", "j0+"),
      keyMessage("keyup", "j0+"),
      keyMessage("keydown", "grip"),
      axisMessage("a0", 0.5),
      axisMessage("a1", -3.0), // clamped into [-1, 1]
      recordMessage("start"),
      recordMessage("stop"),
      resetMessage(),
    ];
    for (const msg of samples) {
      expect(validator.valid(msg), JSON.stringify(msg)).toBe(true);
    }
  });

  it("axis values are clamped into [-1, 1]", () => {
    expect(axisMessage("a0", 7).value).toBe(1);
    expect(axisMessage("a0", -7).value).toBe(-1);
  });

  it("schema rejects what the console never sends", () => {
    expect(validator.valid({ type: "input", kind: "axis", code: "a0" })).toBe(false);
    expect(validator.valid({ type: "input", kind: "warp", code: "x" })).toBe(false);
    expect(validator.valid({ type: "hello" })).toBe(false);
  });
});

const SCENE = {
  type: "scene",
  time: 1.25,
  links: [
    [0, 0],
    [0.8, 0],
    [1.4, 0],
  ],
  objects: [{ p: [0.7, -0.3], r: 0.06, c: 3 }],
  target: [0.9, 0.6],
  success: false,
  reward: -0.5,
  recording: true,
};

describe("server message parsing", () => {
  it("accepts a well-formed scene", () => {
    const msg = parseServerMessage(JSON.stringify(SCENE));
    expect(msg).not.toBeNull();
    expect(msg!.type).toBe("scene");
    expect(validator.valid(msg)).toBe(true);
  });

  it("accepts the other server message kinds", () => {
    for (const raw of [
      { type: "hello", role: "control", env_id: "reach-v0" },
      { type: "episode", event: "done" },
      { type: "record", active: false, saved: 2 },
      { type: "error", msg: "nope" },
      { type: "busy" },
    ]) {
      expect(parseServerMessage(JSON.stringify(raw))).not.toBeNull();
    }
  });

  it("returns null instead of throwing on malformed input", () => {
    const broken = [
      "not json at all",
      "42",
      "{}",
      JSON.stringify({ type: "warp" }),
      JSON.stringify({ ...SCENE, links: [[0]] }),
      JSON.stringify({ ...SCENE, target: "north" }),
      JSON.stringify({ ...SCENE, objects: [{ p: [0, 0] }] }),
      JSON.stringify({ type: "episode", event: "paused" }),
    ];
    for (const raw of broken) {
      expect(parseServerMessage(raw), raw).toBeNull();
    }
  });
});
