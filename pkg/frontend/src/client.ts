// Gateway connection: a thin WebSocket wrapper emitting parsed messages.

import {
  helloMessage,
  parseServerMessage,
  recordMessage,
  resetMessage,
  type ClientMessage,
  type InputMessage,
  type ServerMessage,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  readyState: number;
}

export interface ClientHandlers {
  onMessage(msg: ServerMessage): void;
  onMalformed(raw: string): void;
  onOpen(): void;
  onClose(): void;
}

export class GatewayClient {
  private sock: SocketLike | null = null;
  private recording = false;

  constructor(
    private handlers: ClientHandlers,
    private makeSocket: (url: string) => SocketLike,
  ) {}

  connect(url: string, want: "control" | "spectate" = "control"): void {
    this.disconnect();
    const sock = this.makeSocket(url);
    this.sock = sock;
    sock.onopen = () => {
      this.sendRaw(helloMessage(want));
      this.handlers.onOpen();
    };
    sock.onmessage = (ev) => {
      const raw = String(ev.data);
      const msg = parseServerMessage(raw);
      if (msg === null) {
        this.handlers.onMalformed(raw); // keep the connection
        return;
      }
      if (msg.type === "record") this.recording = msg.active;
      this.handlers.onMessage(msg);
    };
    sock.onclose = () => {
      this.sock = null;
      this.handlers.onClose();
    };
    sock.onerror = () => {};
  }

  disconnect(): void {
    if (this.sock) {
      this.sock.close();
      this.sock = null;
    }
  }

  get connected(): boolean {
    return this.sock !== null && this.sock.readyState === 1;
  }

  /** Input events are dropped (not queued) while disconnected. */
  sendInput(msg: InputMessage): boolean {
    if (!this.connected) return false;
    this.sendRaw(msg);
    return true;
  }

  toggleRecord(): void {
    this.sendRaw(recordMessage(this.recording ? "stop" : "start"));
  }

  requestReset(): void {
    this.sendRaw(resetMessage());
  }

  private sendRaw(msg: ClientMessage): void {
    this.sock?.send(JSON.stringify(msg));
  }
}
