// World <-> screen mapping. World y points up, screen y points down; the
// two transforms are exact inverses of each other by construction.

export interface Camera {
  scale: number;    // pixels per meter
  offsetX: number;  // screen x of world origin
  offsetY: number;  // screen y of world origin
}

export function fitDomain(domain: [number, number][], widthPx: number,
                          heightPx: number, marginPx = 20): Camera {
  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (const [x, y] of domain) {
    xmin = Math.min(xmin, x); xmax = Math.max(xmax, x);
    ymin = Math.min(ymin, y); ymax = Math.max(ymax, y);
  }
  const spanX = Math.max(xmax - xmin, 1e-9);
  const spanY = Math.max(ymax - ymin, 1e-9);
  const scale = Math.min((widthPx - 2 * marginPx) / spanX,
                         (heightPx - 2 * marginPx) / spanY);
  const cx = (xmin + xmax) / 2;
  const cy = (ymin + ymax) / 2;
  return {
    scale,
    offsetX: widthPx / 2 - scale * cx,
    offsetY: heightPx / 2 + scale * cy,
  };
}

export function worldToScreen(cam: Camera, p: [number, number]): [number, number] {
  return [cam.offsetX + cam.scale * p[0], cam.offsetY - cam.scale * p[1]];
}

export function screenToWorld(cam: Camera, s: [number, number]): [number, number] {
  return [(s[0] - cam.offsetX) / cam.scale, (cam.offsetY - s[1]) / cam.scale];
}
