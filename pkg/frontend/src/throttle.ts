// Rate limiter for the drag command stream: at most maxPerSecond calls pass
// through; the most recent suppressed value can be flushed (pointer release).

export class Throttle<T> {
  private lastEmit = -Infinity;
  private pending: T | null = null;
  private readonly interval: number;

  constructor(private emit: (value: T) => void, maxPerSecond: number,
              private now: () => number = () => performance.now()) {
    this.interval = 1000 / maxPerSecond;
  }

  push(value: T): boolean {
    const t = this.now();
    if (t - this.lastEmit >= this.interval) {
      this.lastEmit = t;
      this.pending = null;
      this.emit(value);
      return true;
    }
    this.pending = value;
    return false;
  }

  flush(): boolean {
    if (this.pending === null) return false;
    const value = this.pending;
    this.pending = null;
    this.lastEmit = this.now();
    this.emit(value);
    return true;
  }
}
