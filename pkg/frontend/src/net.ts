// Websocket client with reconnect and a bounded offline queue: commands sent
// while disconnected are held up to queueTtlMs (default 1 s) and flushed on
// reconnect; older ones are dropped with a notice callback.

import { Command, ServerMessage, encodeCommand, parseServerMessage } from "./protocol.js";

export interface WsLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export type WsFactory = (url: string) => WsLike;

const OPEN = 1;

interface QueuedCommand {
  at: number;
  cmd: Command;
}

export interface ClientCallbacks {
  onMessage?: (msg: ServerMessage) => void;
  onStatus?: (connected: boolean) => void;
  onDrop?: (count: number) => void;
}

export class ConsoleClient {
  private ws: WsLike | null = null;
  private queue: QueuedCommand[] = [];
  private closed = false;
  private reconnectDelayMs = 500;

  constructor(private url: string, private factory: WsFactory,
              private callbacks: ClientCallbacks = {},
              private now: () => number = () => Date.now(),
              private schedule: (fn: () => void, ms: number) => void =
                  (fn, ms) => { setTimeout(fn, ms); },
              private queueTtlMs = 1000) {}

  connect(): void {
    if (this.closed) return;
    const ws = this.factory(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.callbacks.onStatus?.(true);
      this.flushQueue();
    };
    ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg !== null) this.callbacks.onMessage?.(msg);
    };
    const dropped = () => {
      if (this.ws !== ws) return;
      this.ws = null;
      this.callbacks.onStatus?.(false);
      if (!this.closed) this.schedule(() => this.connect(), this.reconnectDelayMs);
    };
    ws.onclose = dropped;
    ws.onerror = dropped;
  }

  private flushQueue(): void {
    const cutoff = this.now() - this.queueTtlMs;
    const fresh = this.queue.filter((q) => q.at >= cutoff);
    const droppedCount = this.queue.length - fresh.length;
    this.queue = [];
    if (droppedCount > 0) this.callbacks.onDrop?.(droppedCount);
    for (const q of fresh) this.sendNow(q.cmd);
  }

  private sendNow(cmd: Command): void {
    this.ws?.send(encodeCommand(cmd));
  }

  send(cmd: Command): void {
    // expire stale queued commands even while still offline
    const cutoff = this.now() - this.queueTtlMs;
    const before = this.queue.length;
    this.queue = this.queue.filter((q) => q.at >= cutoff);
    if (before > this.queue.length) this.callbacks.onDrop?.(before - this.queue.length);

    if (this.ws !== null && this.ws.readyState === OPEN) {
      this.sendNow(cmd);
    } else {
      this.queue.push({ at: this.now(), cmd });
    }
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
    this.ws = null;
  }
}
