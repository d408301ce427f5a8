// Scene painter. Takes a minimal 2D-context interface so tests can pass a
// recording stub; the browser CanvasRenderingContext2D satisfies it as-is.

import { Camera, worldToScreen } from "./camera.js";
import { HeatmapBuffer } from "./heatmap.js";
import { ViewState } from "./viewstate.js";

export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface RenderExtras {
  heatmap?: ((buf: HeatmapBuffer) => void) | null;
  heatmapBuffer?: HeatmapBuffer | null;
}

function tracePolygon(ctx: Ctx2D, cam: Camera, poly: [number, number][]): void {
  ctx.beginPath();
  poly.forEach((p, i) => {
    const [x, y] = worldToScreen(cam, p);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.closePath();
}

export function render(ctx: Ctx2D, view: ViewState, extras: RenderExtras = {}): void {
  const { canvasWidth: w, canvasHeight: h } = view;
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, w, h);

  if (view.frame === null || view.camera === null) {
    ctx.fillStyle = "#0b1020";
    ctx.fillRect(0, 0, w, h);
    ctx.fillStyle = "#8aa";
    ctx.font = "16px sans-serif";
    ctx.fillText(view.connection === "dropped" ? "connection lost - retrying" : "connecting...",
                 w / 2 - 70, h / 2);
    return;
  }

  const frame = view.frame;
  const cam = view.camera;

  if (extras.heatmap && extras.heatmapBuffer) {
    extras.heatmap(extras.heatmapBuffer);
  } else {
    ctx.fillStyle = "#101830";
    ctx.fillRect(0, 0, w, h);
  }

  // domain boundary
  ctx.strokeStyle = "#e8e8e8";
  ctx.lineWidth = 2.5;
  tracePolygon(ctx, cam, frame.domain);
  ctx.stroke();

  // cells: thick boundaries
  ctx.strokeStyle = "#f5f5f5";
  ctx.lineWidth = 2;
  for (const cell of frame.cells) {
    if (cell.length < 3) continue;
    tracePolygon(ctx, cam, cell);
    ctx.stroke();
  }

  // centroids: bright circles
  ctx.fillStyle = "#ffe94d";
  for (const c of frame.centroids) {
    const [x, y] = worldToScreen(cam, c);
    ctx.beginPath();
    ctx.arc(x, y, 4, 0, 2 * Math.PI);
    ctx.fill();
  }

  // robots with heading tick
  frame.positions.forEach((p, i) => {
    const [x, y] = worldToScreen(cam, p);
    ctx.fillStyle = "#5ad1ff";
    ctx.beginPath();
    ctx.arc(x, y, 6, 0, 2 * Math.PI);
    ctx.fill();
    const th = frame.headings[i] ?? 0;
    ctx.strokeStyle = "#04364f";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x + 10 * Math.cos(th), y - 10 * Math.sin(th));
    ctx.stroke();
  });

  // density component handles
  frame.density.components.forEach((c, i) => {
    const [x, y] = worldToScreen(cam, c.center);
    ctx.strokeStyle = i === view.selected ? "#ff7043" : "#ffffff";
    ctx.lineWidth = i === view.selected ? 3 : 1.5;
    ctx.beginPath();
    ctx.arc(x, y, 10, 0, 2 * Math.PI);
    ctx.stroke();
  });

  // status badges
  ctx.font = "13px sans-serif";
  let badgeY = 20;
  const badge = (text: string, color: string) => {
    ctx.fillStyle = color;
    ctx.fillText(text, 10, badgeY);
    badgeY += 18;
  };
  badge(`t = ${frame.t.toFixed(2)} s   ${frame.controller}   H = ${frame.H.toFixed(3)}`,
        "#d0d0d0");
  if (frame.lambda_max !== null) {
    badge(`|lambda_max| = ${frame.lambda_max.toFixed(3)}`,
          frame.lambda_max >= 1 ? "#ff5252" : "#9ccc65");
  }
  if (frame.condition_flag) badge("WARNING: near-singular solve, 1-hop fallback", "#ff5252");
  if (frame.paused) badge("PAUSED", "#ffb300");
  if (frame.error) badge(`ERROR: ${frame.error}`, "#ff5252");
  if (view.connection === "dropped") badge("connection lost - retrying", "#ff5252");
  if (view.notice) badge(view.notice, "#ffb300");
}
