// Ring buffer + polyline builder for the live H and |lambda_max| panels.

export interface ChartSample {
  t: number;
  value: number;
}

export class StripChart {
  private samples: ChartSample[] = [];

  constructor(private capacity = 600, private windowSeconds = 30) {}

  push(t: number, value: number): void {
    const last = this.samples[this.samples.length - 1];
    if (last !== undefined && t < last.t) {
      // time went backwards (reset): start over
      this.samples = [];
    }
    this.samples.push({ t, value });
    if (this.samples.length > this.capacity) {
      this.samples.splice(0, this.samples.length - this.capacity);
    }
  }

  get size(): number {
    return this.samples.length;
  }

  latest(): ChartSample | undefined {
    return this.samples[this.samples.length - 1];
  }

  visible(): ChartSample[] {
    const last = this.samples[this.samples.length - 1];
    if (last === undefined) return [];
    const t0 = last.t - this.windowSeconds;
    return this.samples.filter((s) => s.t >= t0);
  }

  // Pixel-space polyline for a width x height panel; values are clamped into
  // [lo, hi] (auto range when omitted).
  polyline(width: number, height: number, lo?: number, hi?: number):
      [number, number][] {
    const pts = this.visible().filter((s) => Number.isFinite(s.value));
    if (pts.length === 0) return [];
    let vmin = lo ?? Infinity;
    let vmax = hi ?? -Infinity;
    if (lo === undefined || hi === undefined) {
      for (const s of pts) {
        vmin = Math.min(vmin, s.value);
        vmax = Math.max(vmax, s.value);
      }
      if (vmax - vmin < 1e-12) {
        vmax = vmin + 1;
      }
    }
    const t1 = pts[pts.length - 1].t;
    const t0 = t1 - this.windowSeconds;
    return pts.map((s) => {
      const x = ((s.t - t0) / this.windowSeconds) * width;
      const u = Math.min(1, Math.max(0, (s.value - vmin) / (vmax - vmin)));
      return [x, height - u * height];
    });
  }
}
