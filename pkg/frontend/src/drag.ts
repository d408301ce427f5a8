// Pointer-drag state machine: converts pointer events on a selected density
// component into a throttled stream of move commands (at most maxPerSecond,
// default 15) plus one final waypoint on release.

import { Camera, screenToWorld } from "./camera.js";
import { Command, moveCommand } from "./protocol.js";
import { Throttle } from "./throttle.js";

const DRAG_TRAVEL_TIME = 0.3;    // snappy glide while dragging
const RELEASE_TRAVEL_TIME = 0.5; // final settle after release

export class DragController {
  private throttle: Throttle<Command>;
  private active: number | null = null;
  private lastWorld: [number, number] | null = null;

  constructor(private send: (cmd: Command) => void, maxPerSecond = 15,
              now: () => number = () => performance.now()) {
    this.throttle = new Throttle<Command>((cmd) => this.send(cmd), maxPerSecond, now);
  }

  get dragging(): number | null {
    return this.active;
  }

  begin(componentIndex: number): void {
    this.active = componentIndex;
    this.lastWorld = null;
  }

  move(cam: Camera, screen: [number, number]): void {
    if (this.active === null) return;
    const world = screenToWorld(cam, screen);
    this.lastWorld = world;
    this.throttle.push(moveCommand(this.active, world, DRAG_TRAVEL_TIME));
  }

  end(cam: Camera, screen: [number, number] | null): void {
    if (this.active === null) return;
    const world = screen !== null ? screenToWorld(cam, screen) : this.lastWorld;
    if (world !== null) {
      // release always emits, bypassing the rate limit
      this.send(moveCommand(this.active, world, RELEASE_TRAVEL_TIME));
    }
    this.active = null;
    this.lastWorld = null;
  }

  cancel(): void {
    this.active = null;
    this.lastWorld = null;
  }
}
