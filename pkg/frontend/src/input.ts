// Keyboard and gamepad capture: physical inputs -> logical protocol codes.
//
// Default bindings: two keys per joint (+/-), Space toggles grasp, R resets,
// Enter toggles recording. Rebindable at runtime; repeat suppression keeps
// one keydown message per physical press.

import { axisMessage, keyMessage, type InputMessage } from "./protocol.js";

export type Action =
  | { kind: "joint"; code: string }
  | { kind: "grip" }
  | { kind: "reset" }
  | { kind: "record" };

export const DEFAULT_BINDINGS: Record<string, Action> = {
  KeyQ: { kind: "joint", code: "j0+" },
  KeyA: { kind: "joint", code: "j0-" },
  KeyW: { kind: "joint", code: "j1+" },
  KeyS: { kind: "joint", code: "j1-" },
  KeyE: { kind: "joint", code: "j2+" },
  KeyD: { kind: "joint", code: "j2-" },
  Space: { kind: "grip" },
  KeyR: { kind: "reset" },
  Enter: { kind: "record" },
};

export interface InputEvents {
  sendInput(msg: InputMessage): void;
  toggleRecord(): void;
  requestReset(): void;
}

export class InputCapture {
  bindings: Record<string, Action>;
  private down = new Set<string>();
  private axisValues = new Map<string, number>();

  constructor(
    private out: InputEvents,
    bindings: Record<string, Action> = DEFAULT_BINDINGS,
  ) {
    this.bindings = { ...bindings };
  }

  rebind(physicalKey: string, action: Action): void {
    this.bindings[physicalKey] = action;
  }

  /** Handle a physical key press; true when the key was bound. */
  keyDown(physicalKey: string): boolean {
    const action = this.bindings[physicalKey];
    if (!action) return false;
    if (this.down.has(physicalKey)) return true; // auto-repeat suppressed
    this.down.add(physicalKey);
    switch (action.kind) {
      case "joint":
        this.out.sendInput(keyMessage("keydown", action.code));
        break;
      case "grip":
        this.out.sendInput(keyMessage("keydown", "grip"));
        break;
      case "reset":
        this.out.requestReset();
        break;
      case "record":
        this.out.toggleRecord();
        break;
    }
    return true;
  }

  keyUp(physicalKey: string): boolean {
    const action = this.bindings[physicalKey];
    if (!action) return false;
    this.down.delete(physicalKey);
    if (action.kind === "joint") {
      this.out.sendInput(keyMessage("keyup", action.code));
    }
    return true;
  }

  releaseAll(): void {
    for (const physicalKey of [...this.down]) {
      this.keyUp(physicalKey);
    }
  }

  /**
   * Poll gamepad axes (axis i drives joint i). Emits an axis message when a
   * value changed by more than the deadband or snapped back to zero.
   */
  pollGamepad(axes: readonly number[], deadband = 0.05): void {
    axes.forEach((raw, i) => {
      const code = `a${i}`;
      const value = Math.abs(raw) < deadband ? 0 : raw;
      const prev = this.axisValues.get(code) ?? 0;
      if (value === prev) return;
      this.axisValues.set(code, value);
      this.out.sendInput(axisMessage(code, value));
    });
  }
}
