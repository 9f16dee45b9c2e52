// Expectation badges: a compact pass/fail/unknown strip for the preset's
// machine-checkable claims. Values come from the server's stats endpoint;
// cross-preset baselines are not evaluated live and show as "baseline".

import type { ExpectationDoc } from "./types.js";

export interface Badge {
  label: string;
  state: "pass" | "fail" | "pending" | "baseline";
  detail: string;
}

const OPS: Record<string, (a: number, b: number) => boolean> = {
  "==": (a, b) => a === b,
  "!=": (a, b) => a !== b,
  "<": (a, b) => a < b,
  "<=": (a, b) => a <= b,
  ">": (a, b) => a > b,
  ">=": (a, b) => a >= b,
};

export function evaluateBadge(
  exp: ExpectationDoc,
  measured: number | null | undefined,
): Badge {
  const label = `${exp.metric}(${exp.population}) ${exp.op} ${exp.baseline ?? exp.value}`;
  if (exp.baseline) {
    return { label, state: "baseline", detail: `compared offline against ${exp.baseline}` };
  }
  if (measured === null || measured === undefined || Number.isNaN(measured)) {
    return { label, state: "pending", detail: "no data yet" };
  }
  const ok = OPS[exp.op]?.(measured, exp.value ?? NaN) ?? false;
  return {
    label,
    state: ok ? "pass" : "fail",
    detail: `measured ${measured}`,
  };
}

/** Map stats-report fields onto the expectation metrics the server also computes. */
export function metricFromStats(
  metric: string,
  report: Record<string, unknown> | null,
): number | null {
  if (!report) return null;
  switch (metric) {
    case "spike_count":
      return (report["total_events"] as number) ?? null;
    case "wta_index":
      return (report["concentration"] as number | null) ?? null;
    case "mean_rate_hz":
      return (report["mean_rate_hz"] as number) ?? null;
    default:
      return null; // evaluated only by the offline preset runner
  }
}
