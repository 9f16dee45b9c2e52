// Raster geometry and its canvas adapter. All layout math lives in pure
// functions; the canvas call is a thin brush over precomputed ticks.

import type { PopulationSpec, SpikeEvent } from "./types.js";

export interface Tick {
  x: number;
  y: number;
  color: string;
}

export interface RasterLayout {
  width: number;
  height: number;
  windowStart: number;
  windowSteps: number;
}

export interface Lane {
  pop: string;
  size: number;
  color: string;
  y0: number;
  height: number;
}

export const EXCITATORY_COLOR = "#111111";
export const INHIBITORY_COLOR = "#cc2222";

export function laneColor(role: string | undefined): string {
  return role === "inhibitory" ? INHIBITORY_COLOR : EXCITATORY_COLOR;
}

/** Stacked lanes, one per recorded population, in declaration order. */
export function buildLanes(populations: PopulationSpec[], height: number): Lane[] {
  const laneHeight = height / Math.max(populations.length, 1);
  return populations.map((p, i) => ({
    pop: p.id,
    size: p.size,
    color: laneColor(p.role),
    y0: i * laneHeight,
    height: laneHeight,
  }));
}

export function tickPosition(
  ev: SpikeEvent,
  lane: Lane,
  layout: RasterLayout,
): Tick | null {
  const rel = ev.step - layout.windowStart;
  if (rel < 0 || rel >= layout.windowSteps) return null;
  const x = (rel / layout.windowSteps) * layout.width;
  const pad = 4;
  const usable = lane.height - 2 * pad;
  const y = lane.y0 + pad + usable * (1 - ev.neuron / Math.max(lane.size, 1));
  return { x, y, color: lane.color };
}

export function computeTicks(
  events: SpikeEvent[],
  lanes: Lane[],
  layout: RasterLayout,
): Tick[] {
  const byPop = new Map(lanes.map((l) => [l.pop, l]));
  const ticks: Tick[] = [];
  for (const ev of events) {
    const lane = byPop.get(ev.pop);
    if (!lane) continue; // population not displayed: a lane filter, not an error
    const tick = tickPosition(ev, lane, layout);
    if (tick) ticks.push(tick);
  }
  return ticks;
}

export function drawRaster(
  ctx: CanvasRenderingContext2D,
  ticks: Tick[],
  layout: RasterLayout,
  lanes: Lane[],
): void {
  ctx.clearRect(0, 0, layout.width, layout.height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, layout.width, layout.height);
  for (const lane of lanes) {
    ctx.strokeStyle = "#dddddd";
    ctx.beginPath();
    ctx.moveTo(0, lane.y0 + lane.height);
    ctx.lineTo(layout.width, lane.y0 + lane.height);
    ctx.stroke();
    ctx.fillStyle = "#555555";
    ctx.font = "11px sans-serif";
    ctx.fillText(lane.pop, 4, lane.y0 + 12);
  }
  for (const tick of ticks) {
    ctx.strokeStyle = tick.color;
    ctx.beginPath();
    ctx.moveTo(tick.x, tick.y - 2);
    ctx.lineTo(tick.x, tick.y + 2);
    ctx.stroke();
  }
}
