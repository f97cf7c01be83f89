// 2D canvas rendering of scene messages.
//
// World-to-screen transform: the viewport is the square [-S, S]^2 in meters
// (y up), where S = 1.1 x total chain length measured from the first scene's
// link frames. Pixels: px = (x/(2S) + 0.5) * W, py = (0.5 - y/(2S)) * H.

import type { SceneMessage } from "./protocol.js";

export const PALETTE_SIZE = 8;
export const LINK_WIDTH_PX = 6;

// Shades matching the grid camera's (color_index + 1) / palette convention.
export function paletteColor(index: number): string {
  const shade = Math.round(((index + 1) / PALETTE_SIZE) * 200) + 40;
  return `rgb(${shade}, ${Math.round(shade * 0.8)}, ${255 - shade})`;
}

export interface Drawable {
  // the subset of CanvasRenderingContext2D the renderer touches
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  lineWidth: number;
  strokeStyle: string | object; // CanvasGradient/CanvasPattern on real contexts
  fillStyle: string | object;
  font: string;
}

export class Renderer {
  private extent = 0; // S, meters; measured from the first scene

  constructor(
    private ctx: Drawable,
    private width: number,
    private height: number,
  ) {}

  viewExtent(scene: SceneMessage): number {
    if (this.extent === 0) {
      let reach = 0;
      for (let k = 1; k < scene.links.length; k++) {
        const dx = scene.links[k][0] - scene.links[k - 1][0];
        const dy = scene.links[k][1] - scene.links[k - 1][1];
        reach += Math.hypot(dx, dy);
      }
      this.extent = 1.1 * reach;
    }
    return this.extent;
  }

  toScreen(x: number, y: number, s: number): [number, number] {
    return [(x / (2 * s) + 0.5) * this.width, (0.5 - y / (2 * s)) * this.height];
  }

  scale(meters: number, s: number): number {
    return (meters / (2 * s)) * this.width;
  }

  render(scene: SceneMessage): void {
    const ctx = this.ctx;
    const s = this.viewExtent(scene);
    ctx.clearRect(0, 0, this.width, this.height);
    ctx.fillStyle = "#10141c";
    ctx.fillRect(0, 0, this.width, this.height);

    // target ring
    const [tx, ty] = this.toScreen(scene.target[0], scene.target[1], s);
    ctx.lineWidth = 2;
    ctx.strokeStyle = scene.success ? "#3dd66f" : "#e3b33d";
    ctx.beginPath();
    ctx.arc(tx, ty, this.scale(0.05, s), 0, 2 * Math.PI);
    ctx.stroke();

    // discs
    for (const obj of scene.objects) {
      const [ox, oy] = this.toScreen(obj.p[0], obj.p[1], s);
      ctx.fillStyle = paletteColor(obj.c);
      ctx.beginPath();
      ctx.arc(ox, oy, this.scale(obj.r, s), 0, 2 * Math.PI);
      ctx.fill();
    }

    // chain links + joints
    ctx.beginPath();
    const [bx, by] = this.toScreen(scene.links[0][0], scene.links[0][1], s);
    ctx.moveTo(bx, by);
    for (let k = 1; k < scene.links.length; k++) {
      const [x, y] = this.toScreen(scene.links[k][0], scene.links[k][1], s);
      ctx.lineTo(x, y);
    }
    ctx.lineWidth = LINK_WIDTH_PX;
    ctx.strokeStyle = "#d7dde7";
    ctx.stroke();
    ctx.fillStyle = "#8fa0b8";
    for (const frame of scene.links) {
      const [jx, jy] = this.toScreen(frame[0], frame[1], s);
      ctx.beginPath();
      ctx.arc(jx, jy, LINK_WIDTH_PX * 0.8, 0, 2 * Math.PI);
      ctx.fill();
    }

    // success banner
    if (scene.success) {
      ctx.fillStyle = "#3dd66f";
      ctx.fillRect(0, 0, this.width, 26);
      ctx.fillStyle = "#08240f";
      ctx.font = "16px monospace";
      ctx.fillText("SUCCESS", 10, 18);
    }
  }

  renderErrorBanner(message: string): void {
    const ctx = this.ctx;
    ctx.fillStyle = "#b33a3a";
    ctx.fillRect(0, this.height - 26, this.width, 26);
    ctx.fillStyle = "#ffffff";
    ctx.font = "13px monospace";
    ctx.fillText(message, 8, this.height - 8);
  }
}
