// Frame-stream consumption: ordering/gap checks, spike reassembly, and the
// WebSocket client with cursor-based resume.

import type { Frame, SpikeEvent, StreamMessage } from "./types.js";

export interface StreamIntegrity {
  ok: boolean;
  problems: string[];
}

/** Frames must arrive in seq order with no gaps or duplicates. */
export function checkIntegrity(frames: Frame[]): StreamIntegrity {
  const problems: string[] = [];
  for (let i = 0; i < frames.length; i++) {
    if (i > 0) {
      const prev = frames[i - 1];
      const cur = frames[i];
      if (cur.seq !== prev.seq + 1) {
        problems.push(`seq gap: ${prev.seq} -> ${cur.seq}`);
      }
      if (cur.step <= prev.step) {
        problems.push(`non-monotonic step: ${prev.step} -> ${cur.step}`);
      }
    }
  }
  return { ok: problems.length === 0, problems };
}

/** Flatten frame spike payloads into one event list (the recording's content). */
export function reassembleSpikes(frames: Frame[]): SpikeEvent[] {
  const events: SpikeEvent[] = [];
  for (const frame of frames) {
    for (const [pop, rows] of Object.entries(frame.spikes)) {
      for (const [step, neuron] of rows) {
        events.push({ pop, step, neuron });
      }
    }
  }
  return events;
}

/** Canonical sort used when comparing against an exported recording. */
export function sortEvents(events: SpikeEvent[]): SpikeEvent[] {
  return [...events].sort(
    (a, b) => a.step - b.step || a.pop.localeCompare(b.pop) || a.neuron - b.neuron,
  );
}

/** Parse an NDJSON recording export into the same event list shape. */
export function parseNdjson(text: string, dtMs: number): SpikeEvent[] {
  const events: SpikeEvent[] = [];
  for (const line of text.split("\n")) {
    if (!line.trim()) continue;
    const doc = JSON.parse(line) as { t_ms: number; population: string; neuron: number };
    events.push({ pop: doc.population, step: Math.round(doc.t_ms / dtMs), neuron: doc.neuron });
  }
  return events;
}

export function sameEvents(a: SpikeEvent[], b: SpikeEvent[]): boolean {
  if (a.length !== b.length) return false;
  const sa = sortEvents(a);
  const sb = sortEvents(b);
  return sa.every(
    (e, i) => e.pop === sb[i].pop && e.step === sb[i].step && e.neuron === sb[i].neuron,
  );
}

export interface FrameStreamHandlers {
  onFrame: (frame: Frame) => void;
  onEnd: (reason: string) => void;
  onIntegrityProblem?: (problem: string) => void;
}

/**
 * WebSocket consumer. Tracks the frame cursor so a reconnect resumes from the
 * last acknowledged frame instead of replaying or dropping anything.
 */
export class FrameStream {
  private ws: WebSocket | null = null;
  private cursor = 0;
  private lastSeq = -1;
  private closed = false;
  private retryMs = 500;

  constructor(
    private readonly url: string,
    private readonly handlers: FrameStreamHandlers,
  ) {}

  open(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.retryMs = 500;
      // resume: the server skips frames the client already holds
      this.ws?.send(JSON.stringify({ cursor: this.cursor }));
    };
    this.ws.onmessage = (ev: MessageEvent) => {
      const msg = JSON.parse(String(ev.data)) as StreamMessage;
      if (msg.type === "end") {
        this.closed = true;
        this.handlers.onEnd(msg.reason);
        this.ws?.close();
        return;
      }
      if (this.lastSeq >= 0 && msg.seq !== this.lastSeq + 1) {
        this.handlers.onIntegrityProblem?.(`seq gap ${this.lastSeq} -> ${msg.seq}`);
      }
      this.lastSeq = msg.seq;
      this.cursor += 1;
      this.handlers.onFrame(msg);
    };
    this.ws.onclose = () => {
      if (!this.closed) {
        setTimeout(() => this.open(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 8000);
      }
    };
  }

  setDecimation(k: number): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify({ decimation: k }));
    }
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
