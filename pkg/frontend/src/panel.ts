// Parameter panel model: sliders come from the preset's calibrated ranges,
// never from hard-coded bounds, so the UI only offers values the preset's
// calibration vouches for.

import type { NetworkSpecDoc, PresetDoc } from "./types.js";
import type { SliderState } from "./state.js";

export function currentValue(spec: NetworkSpecDoc, path: string): number | null {
  const parts = path.split(".");
  if (parts[0] === "projections" && parts.length === 3 && parts[2] === "weight") {
    const proj = spec.projections.find((p) => p.id === parts[1]);
    return proj ? proj.weight : null;
  }
  if (parts[0] === "populations" && parts.length === 4 && parts[2] === "params") {
    const pop = spec.populations.find((p) => p.id === parts[1]) as
      | { params?: Record<string, number> }
      | undefined;
    const v = pop?.params?.[parts[3]];
    return typeof v === "number" ? v : null;
  }
  return null;
}

export function buildSliders(preset: PresetDoc): SliderState[] {
  const sliders: SliderState[] = [];
  for (const [path, range] of Object.entries(preset.calibrated.tunable_ranges)) {
    const value = currentValue(preset.spec, path);
    if (value === null) continue;
    const [a, b] = range;
    sliders.push({
      path,
      min: Math.min(a, b),
      max: Math.max(a, b),
      ackValue: value,
      pendingValue: null,
      error: null,
    });
  }
  return sliders;
}

export function sliderLabel(path: string): string {
  const parts = path.split(".");
  if (parts[0] === "projections") return `${parts[1]} weight`;
  if (parts[0] === "populations") return `${parts[1]} ${parts[3]}`;
  return path;
}
