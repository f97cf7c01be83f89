// Console protocol messages (mirror of docs/schemas/console_protocol.schema.json).

export interface SceneObject {
  p: [number, number];
  r: number;
  c: number;
}

export interface SceneMessage {
  type: "scene";
  time: number;
  links: [number, number][];
  objects: SceneObject[];
  target: [number, number];
  success: boolean;
  reward: number;
  recording?: boolean;
}

export interface HelloMessage {
  type: "hello";
  role: "control" | "spectate";
  env_id?: string;
}

export interface EpisodeMessage {
  type: "episode";
  event: "reset" | "done";
}

export interface RecordMessage {
  type: "record";
  active: boolean;
  saved?: number;
  note?: string;
}

export interface ErrorMessage {
  type: "error";
  msg: string;
}

export interface BusyMessage {
  type: "busy";
}

export type ServerMessage =
  | SceneMessage
  | HelloMessage
  | EpisodeMessage
  | RecordMessage
  | ErrorMessage
  | BusyMessage;

export type InputKind = "keydown" | "keyup" | "axis";

export interface InputMessage {
  type: "input";
  kind: InputKind;
  code: string;
  value?: number;
}

export type ClientMessage =
  | { type: "hello"; want: "control" | "spectate" }
  | InputMessage
  | { type: "record"; action: "start" | "stop" }
  | { type: "reset" };

function isPoint(x: unknown): x is [number, number] {
  return (
    Array.isArray(x) &&
    x.length === 2 &&
    typeof x[0] === "number" &&
    typeof x[1] === "number"
  );
}

/** Parse one server frame; returns null (never throws) on malformed input. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  switch (msg.type) {
    case "scene": {
      if (
        typeof msg.time !== "number" ||
        !Array.isArray(msg.links) ||
        msg.links.length < 2 ||
        !msg.links.every(isPoint) ||
        !Array.isArray(msg.objects) ||
        !isPoint(msg.target) ||
        typeof msg.success !== "boolean" ||
        typeof msg.reward !== "number"
      ) {
        return null;
      }
      for (const o of msg.objects as unknown[]) {
        const obj = o as Record<string, unknown>;
        if (!isPoint(obj.p) || typeof obj.r !== "number" || typeof obj.c !== "number") {
          return null;
        }
      }
      return msg as unknown as SceneMessage;
    }
    case "hello":
      return msg.role === "control" || msg.role === "spectate"
        ? (msg as unknown as HelloMessage)
        : null;
    case "episode":
      return msg.event === "reset" || msg.event === "done"
        ? (msg as unknown as EpisodeMessage)
        : null;
    case "record":
      return typeof msg.active === "boolean" ? (msg as unknown as RecordMessage) : null;
    case "error":
      return typeof msg.msg === "string" ? (msg as unknown as ErrorMessage) : null;
    case "busy":
      return { type: "busy" };
    default:
      return null;
  }
}

export function helloMessage(want: "control" | "spectate"): ClientMessage {
  return { type: "hello", want };
}

export function keyMessage(kind: "keydown" | "keyup", code: string): InputMessage {
  return { type: "input", kind, code };
}

export function axisMessage(code: string, value: number): InputMessage {
  return { type: "input", kind: "axis", code, value: Math.max(-1, Math.min(1, value)) };
}

export function recordMessage(action: "start" | "stop"): ClientMessage {
  return { type: "record", action };
}

export function resetMessage(): ClientMessage {
  return { type: "reset" };
}
