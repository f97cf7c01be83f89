// Gateway client over a scripted fake socket: hello on open, tolerant
// parsing, input dropped while disconnected, record toggling.

import { describe, expect, it } from "vitest";

import { GatewayClient, type SocketLike } from "../src/client.js";
import { keyMessage, type ServerMessage } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  readyState = 0;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string) { this.sent.push(data); }
  close() { this.readyState = 3; this.onclose?.(); }

  open() { this.readyState = 1; this.onopen?.(); }
  receive(raw: string) { this.onmessage?.({ data: raw }); }
}

function makeClient() {
  const received: ServerMessage[] = [];
  const malformed: string[] = [];
  const events: string[] = [];
  let sock!: FakeSocket;
  const client = new GatewayClient(
    {
      onMessage: (m) => received.push(m),
      onMalformed: (raw) => malformed.push(raw),
      onOpen: () => events.push("open"),
      onClose: () => events.push("close"),
    },
    () => (sock = new FakeSocket()),
  );
  client.connect("ws://test/");
  return { client, received, malformed, events, sock: () => sock };
}

describe("gateway client", () => {
  it("sends hello on open", () => {
    const { sock } = makeClient();
    sock().open();
    expect(JSON.parse(sock().sent[0])).toEqual({ type: "hello", want: "control" });
  });

  it("dispatches parsed messages and keeps the connection on malformed ones", () => {
    const { received, malformed, sock } = makeClient();
    sock().open();
    sock().receive(JSON.stringify({ type: "episode", event: "done" }));
    sock().receive("{{{not json");
    sock().receive(JSON.stringify({ type: "error", msg: "x" }));
    expect(received.map((m) => m.type)).toEqual(["episode", "error"]);
    expect(malformed.length).toBe(1);
    expect(sock().readyState).toBe(1); // still connected
  });

  it("drops input while disconnected", () => {
    const { client, sock } = makeClient();
    expect(client.sendInput(keyMessage("keydown", "j0+"))).toBe(false);
    sock().open();
    expect(client.sendInput(keyMessage("keydown", "j0+"))).toBe(true);
    expect(sock().sent.length).toBe(2); // hello + input
  });

  it("record toggle follows server acks", () => {
    const { client, sock } = makeClient();
    sock().open();
    client.toggleRecord();
    expect(JSON.parse(sock().sent.at(-1)!)).toEqual({ type: "record", action: "start" });
    sock().receive(JSON.stringify({ type: "record", active: true, saved: 0 }));
    client.toggleRecord();
    expect(JSON.parse(sock().sent.at(-1)!)).toEqual({ type: "record", action: "stop" });
  });

  it("close events reach the handler", () => {
    const { events, sock } = makeClient();
    sock().open();
    sock().close();
    expect(events).toEqual(["open", "close"]);
  });
});
