// Input capture: bindings, repeat suppression, gamepad polling.

import { describe, expect, it } from "vitest";

import { InputCapture, type InputEvents } from "../src/input.js";
import type { InputMessage } from "../src/protocol.js";

class Sink implements InputEvents {
  inputs: InputMessage[] = [];
  records = 0;
  resets = 0;
  sendInput(msg: InputMessage) { this.inputs.push(msg); }
  toggleRecord() { this.records += 1; }
  requestReset() { this.resets += 1; }
}

describe("keyboard capture", () => {
  it("one keydown per physical press, one keyup on release", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    input.keyDown("KeyQ");
    input.keyDown("KeyQ"); // auto-repeat
    input.keyDown("KeyQ");
    input.keyUp("KeyQ");
    expect(sink.inputs).toEqual([
      { type: "input", kind: "keydown", code: "j0+" },
      { type: "input", kind: "keyup", code: "j0+" },
    ]);
  });

  it("unbound keys are ignored", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    expect(input.keyDown("KeyZ")).toBe(false);
    expect(sink.inputs.length).toBe(0);
  });

  it("space grasps, R resets, Enter toggles recording", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    input.keyDown("Space");
    expect(sink.inputs[0]).toEqual({ type: "input", kind: "keydown", code: "grip" });
    input.keyDown("KeyR");
    expect(sink.resets).toBe(1);
    input.keyDown("Enter");
    expect(sink.records).toBe(1);
  });

  it("default bindings give two keys per joint", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    const jointCodes = Object.values(input.bindings)
      .filter((a) => a.kind === "joint")
      .map((a) => (a as { code: string }).code)
      .sort();
    expect(jointCodes).toEqual(["j0+", "j0-", "j1+", "j1-", "j2+", "j2-"]);
  });

  it("rebinding routes subsequent events to the new code", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    input.rebind("KeyZ", { kind: "joint", code: "j1-" });
    input.keyDown("KeyZ");
    input.keyUp("KeyZ");
    expect(sink.inputs.map((m) => m.code)).toEqual(["j1-", "j1-"]);
  });

  it("releaseAll lifts every held key (window blur safety)", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    input.keyDown("KeyQ");
    input.keyDown("KeyW");
    input.releaseAll();
    const ups = sink.inputs.filter((m) => m.kind === "keyup").map((m) => m.code);
    expect(ups.sort()).toEqual(["j0+", "j1+"]);
  });
});

describe("gamepad capture", () => {
  it("axis value reaches the wire within one poll", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    input.pollGamepad([0.5, 0.0]);
    expect(sink.inputs).toEqual([{ type: "input", kind: "axis", code: "a0", value: 0.5 }]);
  });

  it("unchanged values are not re-sent; returning to zero is", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    input.pollGamepad([0.5]);
    input.pollGamepad([0.5]);
    expect(sink.inputs.length).toBe(1);
    input.pollGamepad([0.0]);
    expect(sink.inputs.length).toBe(2);
    expect(sink.inputs[1].value).toBe(0);
  });

  it("deadband snaps small values to zero", () => {
    const sink = new Sink();
    const input = new InputCapture(sink);
    input.pollGamepad([0.02]);
    expect(sink.inputs.length).toBe(0); // 0 -> 0: nothing to send
    input.pollGamepad([0.5]);
    input.pollGamepad([0.02]);
    expect(sink.inputs[1]).toEqual({ type: "input", kind: "axis", code: "a0", value: 0 });
  });
});
