// Message catalog for the coverage-control service (schema version 1).
// Frames are stateless: each one carries everything the console renders.

export const SCHEMA_VERSION = 1;

export interface ComponentDescriptor {
  weight: number;
  scales: [number, number];
  center: [number, number];
  velocity: [number, number];
  path?: unknown;  // full path spec; the console renders from center/velocity
}

export interface DensityDescriptor {
  floor: number;
  components: ComponentDescriptor[];
}

export interface Frame {
  type: "frame";
  schema_version: number;
  t: number;
  paused: boolean;
  error: string | null;
  controller: string;
  kappa: number;
  domain: [number, number][];
  positions: [number, number][];
  headings: number[];
  cells: [number, number][][];
  centroids: [number, number][];
  H: number;
  lambda_max: number | null;
  condition_flag: boolean;
  tracking_error: number;
  density: DensityDescriptor;
}

export interface Hello {
  type: "hello";
  schema_version: number;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage = Frame | Hello | ErrorMessage;

export type Command =
  | { type: "command"; action: "move_component"; index: number;
      center: [number, number]; travel_time?: number }
  | { type: "command"; action: "add_component"; center: [number, number];
      weight?: number; scales?: [number, number] }
  | { type: "command"; action: "remove_component"; index: number }
  | { type: "command"; action: "set_controller"; name: string; hops?: number }
  | { type: "command"; action: "set_gain"; kappa: number }
  | { type: "command"; action: "pause" }
  | { type: "command"; action: "resume" }
  | { type: "command"; action: "reset" };

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  if (msg.type === "hello" && typeof msg.schema_version === "number") {
    return { type: "hello", schema_version: msg.schema_version };
  }
  if (msg.type === "error" && typeof msg.message === "string") {
    return { type: "error", message: msg.message };
  }
  if (msg.type === "frame"
      && typeof msg.t === "number"
      && Array.isArray(msg.positions)
      && Array.isArray(msg.cells)
      && Array.isArray(msg.domain)
      && typeof msg.density === "object" && msg.density !== null) {
    return msg as unknown as Frame;
  }
  return null;
}

export function moveCommand(index: number, center: [number, number],
                            travelTime?: number): Command {
  const cmd: Command = { type: "command", action: "move_component", index, center };
  if (travelTime !== undefined) cmd.travel_time = travelTime;
  return cmd;
}

export function encodeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}
