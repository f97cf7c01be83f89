// Page wiring: connect form, canvas render timer, keyboard/gamepad capture.
// The render timer and the input handlers are independent: drawing never
// blocks event capture.

import { GatewayClient, type SocketLike } from "./client.js";
import { InputCapture } from "./input.js";
import { Renderer } from "./renderer.js";
import { ConsoleState } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("scene");
const ctx = canvas.getContext("2d");
if (!ctx) throw new Error("canvas 2d context unavailable");

const state = new ConsoleState();
const renderer = new Renderer(ctx, canvas.width, canvas.height);

const client = new GatewayClient(
  {
    onMessage: (msg) => state.apply(msg, performance.now()),
    onMalformed: () => state.noteMalformed(),
    onOpen: () => {
      state.status = "connecting";
    },
    onClose: () => {
      state.status = "disconnected";
    },
  },
  (url) => new WebSocket(url) as unknown as SocketLike,
);

const input = new InputCapture({
  sendInput: (msg) => client.sendInput(msg),
  toggleRecord: () => client.toggleRecord(),
  requestReset: () => client.requestReset(),
});

el<HTMLButtonElement>("connect").addEventListener("click", () => {
  const url = el<HTMLInputElement>("gateway-url").value.trim();
  const want = el<HTMLSelectElement>("mode").value === "spectate" ? "spectate" : "control";
  client.connect(url, want);
});

window.addEventListener("keydown", (ev) => {
  if ((ev.target as HTMLElement)?.tagName === "INPUT") return;
  if (input.keyDown(ev.code)) ev.preventDefault();
});
window.addEventListener("keyup", (ev) => {
  if (input.keyUp(ev.code)) ev.preventDefault();
});
window.addEventListener("blur", () => input.releaseAll());

// gamepad polling rides the render timer; axis i drives joint i
function pollPads(): void {
  const pads = navigator.getGamepads ? navigator.getGamepads() : [];
  for (const pad of pads) {
    if (pad) {
      input.pollGamepad(pad.axes);
      break;
    }
  }
}

const statusLine = el<HTMLSpanElement>("status");
const errorLine = el<HTMLSpanElement>("errors");

function redraw(): void {
  pollPads();
  if (state.scene) renderer.render(state.scene);
  if (state.lastError) renderer.renderErrorBanner(state.lastError);
  const rec = state.recording ? " REC" : "";
  statusLine.textContent =
    `${state.status} ${state.envId} | ${state.sceneRateHz().toFixed(1)} Hz | ` +
    `episodes ${state.episodes} | saved ${state.savedTrajectories}${rec}`;
  errorLine.textContent = state.lastError;
}
setInterval(redraw, 1000 / 30);
