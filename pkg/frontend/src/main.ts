// Browser entry point: wires the websocket client, view state, drag
// handling, strip charts, and the render loop together.

import { fitDomain } from "./camera.js";
import { DragController } from "./drag.js";
import { rasterize } from "./heatmap.js";
import { ConsoleClient } from "./net.js";
import { Command, Frame } from "./protocol.js";
import { render } from "./renderer.js";
import { StripChart } from "./stripchart.js";
import {
  ViewState,
  applyFrame,
  hitTestComponent,
  initialViewState,
  markDropped,
} from "./viewstate.js";

const params = new URLSearchParams(window.location.search);
const endpoint = params.get("ws")
  ?? `ws://${window.location.hostname || "127.0.0.1"}:8765`;

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const heatCanvas = document.createElement("canvas");
const heatCtx = heatCanvas.getContext("2d")!;

const chartH = document.getElementById("chart-h") as HTMLCanvasElement;
const chartLam = document.getElementById("chart-lambda") as HTMLCanvasElement;

let view: ViewState = initialViewState(canvas.width, canvas.height);
const hChart = new StripChart(2000, 30);
const lamChart = new StripChart(2000, 30);

const client = new ConsoleClient(endpoint, (url) => new WebSocket(url) as never, {
  onMessage: (msg) => {
    if (msg.type === "frame") {
      view = applyFrame(view, msg as Frame);
      hChart.push(msg.t, msg.H);
      if (msg.lambda_max !== null) lamChart.push(msg.t, msg.lambda_max);
    } else if (msg.type === "error") {
      view = { ...view, notice: msg.message };
      setTimeout(() => { view = { ...view, notice: null }; }, 4000);
    }
  },
  onStatus: (connected) => {
    view = connected ? { ...view, connection: "connected" } : markDropped(view);
  },
  onDrop: (count) => {
    view = { ...view, notice: `dropped ${count} queued command(s) while offline` };
  },
});
client.connect();

const send = (cmd: Command) => client.send(cmd);
const drag = new DragController(send, 15);

canvas.addEventListener("pointerdown", (ev) => {
  const pt: [number, number] = [ev.offsetX, ev.offsetY];
  const hit = hitTestComponent(view, pt);
  view = { ...view, selected: hit };
  if (hit !== null) {
    drag.begin(hit);
    canvas.setPointerCapture(ev.pointerId);
  }
});

canvas.addEventListener("pointermove", (ev) => {
  if (drag.dragging === null || view.camera === null) return;
  drag.move(view.camera, [ev.offsetX, ev.offsetY]);
});

canvas.addEventListener("pointerup", (ev) => {
  if (drag.dragging === null || view.camera === null) return;
  drag.end(view.camera, [ev.offsetX, ev.offsetY]);
});

// control strip
function bind(id: string, cmd: () => Command | null): void {
  document.getElementById(id)?.addEventListener("click", () => {
    const c = cmd();
    if (c !== null) send(c);
  });
}

bind("btn-pause", () => ({ type: "command", action: "pause" }));
bind("btn-resume", () => ({ type: "command", action: "resume" }));
bind("btn-reset", () => ({ type: "command", action: "reset" }));
bind("btn-add", () => {
  if (view.frame === null) return null;
  return { type: "command", action: "add_component", center: [0, 0] as [number, number] };
});
bind("btn-remove", () => {
  if (view.selected === null) return null;
  return { type: "command", action: "remove_component", index: view.selected };
});

const controllerSelect = document.getElementById("controller") as HTMLSelectElement;
const hopsInput = document.getElementById("hops") as HTMLInputElement;
document.getElementById("btn-controller")?.addEventListener("click", () => {
  const name = controllerSelect.value;
  const cmd: Command = name === "tvd_dk"
    ? { type: "command", action: "set_controller", name, hops: parseInt(hopsInput.value || "1", 10) }
    : { type: "command", action: "set_controller", name };
  send(cmd);
});

const gainInput = document.getElementById("kappa") as HTMLInputElement;
document.getElementById("btn-gain")?.addEventListener("click", () => {
  const kappa = parseFloat(gainInput.value);
  if (kappa > 0) send({ type: "command", action: "set_gain", kappa });
});

function drawChart(target: HTMLCanvasElement, chart: StripChart,
                   label: string, refLine: number | null): void {
  const g = target.getContext("2d")!;
  const { width, height } = target;
  g.clearRect(0, 0, width, height);
  g.fillStyle = "#0b1020";
  g.fillRect(0, 0, width, height);
  if (refLine !== null) {
    const pts = chart.polyline(width, height, 0, Math.max(1.2, refLine * 1.2));
    g.strokeStyle = "#773333";
    g.beginPath();
    const yRef = height - (refLine / Math.max(1.2, refLine * 1.2)) * height;
    g.moveTo(0, yRef);
    g.lineTo(width, yRef);
    g.stroke();
    strokePolyline(g, pts, "#ffcf5a");
  } else {
    strokePolyline(g, chart.polyline(width, height), "#6fe3a5");
  }
  g.fillStyle = "#aab";
  g.font = "12px sans-serif";
  g.fillText(label, 8, 14);
  const last = chart.latest();
  if (last !== undefined) g.fillText(last.value.toFixed(3), width - 60, 14);
}

function strokePolyline(g: CanvasRenderingContext2D, pts: [number, number][],
                        color: string): void {
  if (pts.length < 2) return;
  g.strokeStyle = color;
  g.lineWidth = 1.5;
  g.beginPath();
  pts.forEach(([x, y], i) => (i === 0 ? g.moveTo(x, y) : g.lineTo(x, y)));
  g.stroke();
}

function tick(): void {
  let extras = {};
  if (view.frame !== null && view.camera !== null) {
    const buf = rasterize(view.frame.density, view.camera, canvas.width, canvas.height, 6);
    heatCanvas.width = buf.width;
    heatCanvas.height = buf.height;
    heatCtx.putImageData(
      new ImageData(buf.data as Uint8ClampedArray<ArrayBuffer>, buf.width, buf.height),
      0, 0);
    extras = {
      heatmapBuffer: buf,
      heatmap: () => ctx.drawImage(heatCanvas, 0, 0),
    };
  }
  render(ctx as never, view, extras);
  drawChart(chartH, hChart, "H(p, t)", null);
  drawChart(chartLam, lamChart, "|lambda_max|  (red line: 1.0)", 1.0);
  requestAnimationFrame(tick);
}

// recompute camera on resize
window.addEventListener("resize", () => {
  if (view.frame !== null) {
    view = {
      ...view,
      camera: fitDomain(view.frame.domain, canvas.width, canvas.height),
    };
  }
});

requestAnimationFrame(tick);
