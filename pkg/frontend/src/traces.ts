// Voltage/state trace rendering: per-frame sampled values into polyline paths.

import type { Frame } from "./types.js";

export interface TracePoint {
  step: number;
  value: number;
}

export interface TraceSeries {
  pop: string;
  variable: string;
  neuron: number;
  points: TracePoint[];
}

/** Collect the decimated samples of one neuron's variable across frames. */
export function extractSeries(
  frames: Frame[],
  pop: string,
  variable: string,
  neuron: number,
): TraceSeries {
  const points: TracePoint[] = [];
  for (const frame of frames) {
    const values = frame.traces[pop]?.[variable];
    if (values && neuron < values.length) {
      points.push({ step: frame.step, value: values[neuron] });
    }
  }
  return { pop, variable, neuron, points };
}

export interface PathLayout {
  width: number;
  height: number;
  windowStart: number;
  windowSteps: number;
  vMin: number;
  vMax: number;
}

export function toPolyline(series: TraceSeries, layout: PathLayout): [number, number][] {
  const span = layout.vMax - layout.vMin || 1;
  const pts: [number, number][] = [];
  for (const p of series.points) {
    const rel = p.step - layout.windowStart;
    if (rel < 0 || rel >= layout.windowSteps) continue;
    const x = (rel / layout.windowSteps) * layout.width;
    const y = layout.height * (1 - (p.value - layout.vMin) / span);
    pts.push([x, y]);
  }
  return pts;
}

export function drawTrace(
  ctx: CanvasRenderingContext2D,
  polyline: [number, number][],
  color = "#2255aa",
): void {
  if (polyline.length < 2) return;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(polyline[0][0], polyline[0][1]);
  for (const [x, y] of polyline.slice(1)) ctx.lineTo(x, y);
  ctx.stroke();
}
