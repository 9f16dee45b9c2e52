// Bounded spike storage for the scrolling raster: keeps only events inside a
// trailing step window, so memory stays constant however long a session runs.

import type { SpikeEvent } from "./types.js";

export class SpikeWindow {
  private events: SpikeEvent[] = [];
  private head = 0; // index of the oldest retained event
  latestStep = 0;

  constructor(public readonly windowSteps: number) {
    if (windowSteps < 1) throw new Error("windowSteps must be >= 1");
  }

  push(batch: SpikeEvent[], frameStep: number): void {
    for (const ev of batch) this.events.push(ev);
    if (frameStep > this.latestStep) this.latestStep = frameStep;
    const cutoff = this.latestStep - this.windowSteps + 1;
    while (this.head < this.events.length && this.events[this.head].step < cutoff) {
      this.head++;
    }
    // compact once the dead prefix dominates
    if (this.head > 4096 && this.head * 2 > this.events.length) {
      this.events = this.events.slice(this.head);
      this.head = 0;
    }
  }

  /** Events currently inside the viewport window, oldest first. */
  visible(): SpikeEvent[] {
    return this.events.slice(this.head);
  }

  get size(): number {
    return this.events.length - this.head;
  }

  get windowStart(): number {
    return Math.max(0, this.latestStep - this.windowSteps + 1);
  }
}
