// Console session state: latest scene only (no interpolation), counters,
// and a measured scene rate over a sliding window.

import type { SceneMessage, ServerMessage } from "./protocol.js";

export type ConnectionStatus = "disconnected" | "connecting" | "control" | "spectate" | "busy";

const RATE_WINDOW = 40; // scene timestamps kept for the Hz estimate

export class ConsoleState {
  status: ConnectionStatus = "disconnected";
  envId = "";
  scene: SceneMessage | null = null;
  recording = false;
  savedTrajectories = 0;
  episodes = 0;
  lastError = "";
  private sceneTimes: number[] = [];

  /** Fold one server message; `now` is a millisecond clock reading. */
  apply(msg: ServerMessage, now: number): void {
    switch (msg.type) {
      case "hello":
        this.status = msg.role;
        this.envId = msg.env_id ?? "";
        break;
      case "scene":
        this.scene = msg;
        if (msg.recording !== undefined) this.recording = msg.recording;
        this.sceneTimes.push(now);
        if (this.sceneTimes.length > RATE_WINDOW) this.sceneTimes.shift();
        break;
      case "episode":
        this.episodes += 1;
        break;
      case "record":
        this.recording = msg.active;
        if (msg.saved !== undefined) this.savedTrajectories = msg.saved;
        if (msg.note) this.lastError = msg.note;
        break;
      case "error":
        this.lastError = msg.msg;
        break;
      case "busy":
        this.status = "busy";
        break;
    }
  }

  noteMalformed(): void {
    this.lastError = "malformed message from gateway";
  }

  /** Measured scene update rate in Hz (0 until two scenes arrived). */
  sceneRateHz(): number {
    const t = this.sceneTimes;
    if (t.length < 2) return 0;
    const span = t[t.length - 1] - t[0];
    return span > 0 ? ((t.length - 1) * 1000) / span : 0;
  }
}
