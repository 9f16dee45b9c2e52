import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { buildSliders, currentValue, sliderLabel } from "../src/panel.js";
import { evaluateBadge, metricFromStats } from "../src/badges.js";
import type { PresetDoc } from "../src/types.js";

const fixture = JSON.parse(
  readFileSync(new URL("./fixtures/session_fig6_lif_ooom.json", import.meta.url), "utf-8"),
);

const preset: PresetDoc = {
  name: "fig6_lif_ooom",
  description: "",
  spec: fixture.spec,
  expectations: [
    { metric: "spike_count", population: "exc", op: ">", value: 0 },
    { metric: "wta_index", population: "exc", op: ">", baseline: "fig6_lif_none" },
  ],
  calibrated: {
    notes: "",
    tunable_ranges: {
      "projections.inh_to_exc.weight": [-0.5, -0.0625],
      "projections.exc_to_inh.weight": [0.25, 2.0],
      "populations.exc.params.tau_v": [5, 20],
    },
  },
};

describe("slider panel from the calibrated block", () => {
  it("one slider per tunable range, seeded with the spec's current value", () => {
    const sliders = buildSliders(preset);
    expect(sliders).toHaveLength(3);
    const byPath = Object.fromEntries(sliders.map((s) => [s.path, s]));
    const w = byPath["projections.inh_to_exc.weight"];
    expect(w.min).toBe(-0.5);
    expect(w.max).toBe(-0.0625);
    expect(w.ackValue).toBe(-0.25);
    expect(byPath["populations.exc.params.tau_v"].ackValue).toBe(10);
  });

  it("ranges come from the preset, not hard-coded bounds", () => {
    const narrowed: PresetDoc = {
      ...preset,
      calibrated: { notes: "", tunable_ranges: { "populations.exc.params.tau_v": [8, 12] } },
    };
    const sliders = buildSliders(narrowed);
    expect(sliders).toHaveLength(1);
    expect(sliders[0].min).toBe(8);
    expect(sliders[0].max).toBe(12);
  });

  it("paths that do not resolve in the spec are skipped", () => {
    const bad: PresetDoc = {
      ...preset,
      calibrated: { notes: "", tunable_ranges: { "projections.ghost.weight": [0, 1] } },
    };
    expect(buildSliders(bad)).toHaveLength(0);
  });

  it("resolves both projection and population paths", () => {
    expect(currentValue(preset.spec, "projections.drive_to_exc.weight")).toBe(1.5);
    expect(currentValue(preset.spec, "populations.inh.params.R_v")).toBe(40);
    expect(currentValue(preset.spec, "populations.inh.params.nope")).toBeNull();
  });

  it("labels are compact and readable", () => {
    expect(sliderLabel("projections.inh_to_exc.weight")).toBe("inh_to_exc weight");
    expect(sliderLabel("populations.exc.params.tau_v")).toBe("exc tau_v");
  });
});

describe("expectation badges", () => {
  it("uses server stats values, never client-side derivations", () => {
    const report = fixture.stats.stats.exc;
    const measured = metricFromStats("spike_count", report);
    expect(measured).toBe(report.total_events);
    const badge = evaluateBadge(preset.expectations[0], measured);
    expect(badge.state).toBe("pass");
  });

  it("baseline comparisons are marked, not silently evaluated", () => {
    const badge = evaluateBadge(preset.expectations[1], 0.5);
    expect(badge.state).toBe("baseline");
  });

  it("missing data shows pending, not fail", () => {
    const badge = evaluateBadge(preset.expectations[0], null);
    expect(badge.state).toBe("pending");
  });
});
