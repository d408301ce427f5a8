// Console state: the latest frame plus interaction state. Rendering is a
// pure function of this object; the console never simulates anything itself.

import { Camera, fitDomain, worldToScreen } from "./camera.js";
import { Frame } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "dropped";

export interface DragState {
  componentIndex: number;
  lastWorld: [number, number];
}

export interface ViewState {
  frame: Frame | null;
  camera: Camera | null;
  selected: number | null;
  drag: DragState | null;
  connection: ConnectionStatus;
  notice: string | null;
  canvasWidth: number;
  canvasHeight: number;
}

export function initialViewState(width: number, height: number): ViewState {
  return {
    frame: null,
    camera: null,
    selected: null,
    drag: null,
    connection: "connecting",
    notice: null,
    canvasWidth: width,
    canvasHeight: height,
  };
}

export function applyFrame(view: ViewState, frame: Frame): ViewState {
  const domainChanged = view.frame === null
    || JSON.stringify(view.frame.domain) !== JSON.stringify(frame.domain);
  const camera = (view.camera === null || domainChanged)
    ? fitDomain(frame.domain, view.canvasWidth, view.canvasHeight)
    : view.camera;
  const nComp = frame.density.components.length;
  const selected = view.selected !== null && view.selected < nComp
    ? view.selected : null;
  return { ...view, frame, camera, selected, connection: "connected" };
}

export function markDropped(view: ViewState): ViewState {
  return { ...view, connection: "dropped", drag: null };
}

// Nearest density component within radiusPx of a screen point, else null.
export function hitTestComponent(view: ViewState, screen: [number, number],
                                 radiusPx = 25): number | null {
  if (view.frame === null || view.camera === null) return null;
  let best: number | null = null;
  let bestD = radiusPx;
  view.frame.density.components.forEach((c, i) => {
    const s = worldToScreen(view.camera!, c.center);
    const d = Math.hypot(s[0] - screen[0], s[1] - screen[1]);
    if (d <= bestD) {
      best = i;
      bestD = d;
    }
  });
  return best;
}
