// Density heatmap rasterizer. Works purely on component descriptors from the
// frame (center, velocity, weight, scales) -- no path knowledge required.

import { Camera, screenToWorld } from "./camera.js";
import { DensityDescriptor } from "./protocol.js";

export interface HeatmapBuffer {
  width: number;
  height: number;
  data: Uint8ClampedArray; // RGBA
}

export function densityValueAt(density: DensityDescriptor, x: number, y: number): number {
  let v = density.floor;
  for (const c of density.components) {
    const dx = x - c.center[0];
    const dy = y - c.center[1];
    v += c.weight * Math.exp(-(c.scales[0] * dx * dx + c.scales[1] * dy * dy));
  }
  return v;
}

// Dark-blue to yellow ramp on normalized intensity.
function rampColor(u: number): [number, number, number] {
  const r = Math.min(255, Math.floor(30 + 225 * u));
  const g = Math.min(255, Math.floor(30 + 190 * u * u));
  const b = Math.floor(70 + 80 * (1 - u));
  return [r, g, b];
}

export function rasterize(density: DensityDescriptor, cam: Camera,
                          width: number, height: number, step = 4): HeatmapBuffer {
  const data = new Uint8ClampedArray(width * height * 4);
  let peak = density.floor;
  for (const c of density.components) peak += c.weight;
  const cols = Math.ceil(width / step);
  const rows = Math.ceil(height / step);
  for (let gy = 0; gy < rows; gy++) {
    for (let gx = 0; gx < cols; gx++) {
      const sx = gx * step + step / 2;
      const sy = gy * step + step / 2;
      const [wx, wy] = screenToWorld(cam, [sx, sy]);
      const u = Math.min(1, densityValueAt(density, wx, wy) / peak);
      const [r, g, b] = rampColor(u);
      for (let py = gy * step; py < Math.min((gy + 1) * step, height); py++) {
        let idx = (py * width + gx * step) * 4;
        for (let px = gx * step; px < Math.min((gx + 1) * step, width); px++) {
          data[idx] = r;
          data[idx + 1] = g;
          data[idx + 2] = b;
          data[idx + 3] = 255;
          idx += 4;
        }
      }
    }
  }
  return { width, height, data };
}

// Brightest pixel of the buffer (test probe; ties resolve to the first hit).
export function peakPixel(buf: HeatmapBuffer): [number, number] {
  let best = -1;
  let bx = 0, by = 0;
  for (let y = 0; y < buf.height; y++) {
    for (let x = 0; x < buf.width; x++) {
      const i = (y * buf.width + x) * 4;
      const intensity = buf.data[i] + buf.data[i + 1];
      if (intensity > best) {
        best = intensity;
        bx = x; by = y;
      }
    }
  }
  return [bx, by];
}
