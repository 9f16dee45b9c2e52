// Dashboard wiring: preset browser -> session -> live raster/traces/sliders.

import { Client, ApiError } from "./api.js";
import { evaluateBadge, metricFromStats } from "./badges.js";
import { buildSliders, sliderLabel } from "./panel.js";
import { buildLanes, computeTicks, drawRaster, RasterLayout } from "./raster.js";
import { SpikeWindow } from "./ringbuffer.js";
import { Store } from "./state.js";
import { FrameStream, reassembleSpikes } from "./stream.js";
import { drawTrace, extractSeries, toPolyline } from "./traces.js";
import type { Frame, PresetDoc } from "./types.js";

const apiBase = (window as any).SNNTUNE_API ?? "";
const client = new Client(apiBase);
const store = new Store();

const el = {
  presets: document.getElementById("presets") as HTMLUListElement,
  banner: document.getElementById("banner") as HTMLDivElement,
  raster: document.getElementById("raster") as HTMLCanvasElement,
  trace: document.getElementById("trace") as HTMLCanvasElement,
  sliders: document.getElementById("sliders") as HTMLDivElement,
  badges: document.getElementById("badges") as HTMLDivElement,
  stats: document.getElementById("stats") as HTMLPreElement,
  controls: document.getElementById("controls") as HTMLDivElement,
  sessionLabel: document.getElementById("session-label") as HTMLSpanElement,
};

let activePreset: PresetDoc | null = null;
let stream: FrameStream | null = null;
let frames: Frame[] = [];
let spikeWindow = new SpikeWindow(2000);
let statsTimer: number | null = null;

function banner(text: string, retry?: () => void): void {
  el.banner.textContent = text;
  el.banner.style.display = text ? "block" : "none";
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "retry";
    button.onclick = retry;
    el.banner.appendChild(button);
  }
}

async function loadPresets(): Promise<void> {
  try {
    const presets = await client.presets();
    banner("");
    el.presets.innerHTML = "";
    for (const preset of presets) {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = "#";
      link.textContent = preset.name;
      link.title = preset.description;
      link.onclick = (ev) => {
        ev.preventDefault();
        void openSession(preset);
      };
      item.appendChild(link);
      el.presets.appendChild(item);
    }
  } catch {
    banner("server unreachable", () => void loadPresets());
  }
}

async function openSession(preset: PresetDoc): Promise<void> {
  if (store.get().sessionId) {
    stream?.close();
    await client.deleteSession(store.get().sessionId!);
    store.dispatch({ kind: "session-closed" });
  }
  activePreset = preset;
  frames = [];
  spikeWindow = new SpikeWindow(Math.min(preset.spec.duration_ms / preset.spec.dt_ms, 5000));
  const created = await client.createSession(preset.spec);
  store.dispatch({
    kind: "session-created",
    sessionId: created.id,
    sliders: buildSliders(preset),
  });
  el.sessionLabel.textContent = `${preset.name} — session ${created.id}`;
  renderSliders();
  renderBadges(null);

  stream = new FrameStream(client.wsUrl(created.id), {
    onFrame: (frame) => {
      frames.push(frame);
      const events = reassembleSpikes([frame]);
      spikeWindow.push(events.map((e) => ({ ...e })), frame.step);
      store.dispatch({ kind: "status", status: "running", step: frame.step });
      renderCanvases();
    },
    onEnd: () => {
      store.dispatch({ kind: "status", status: "done", step: spikeWindow.latestStep });
    },
    onIntegrityProblem: (problem) =>
      store.dispatch({ kind: "stream-problem", problem }),
  });
  stream.open();
  await client.run(created.id);
  if (statsTimer !== null) window.clearInterval(statsTimer);
  statsTimer = window.setInterval(() => void refreshStats(), 1000);
}

function renderCanvases(): void {
  if (!activePreset) return;
  const recorded = new Set(
    activePreset.spec.records.filter((r) => r.what === "spikes").map((r) => r.population),
  );
  const pops = activePreset.spec.populations.filter((p) => recorded.has(p.id));
  const layout: RasterLayout = {
    width: el.raster.width,
    height: el.raster.height,
    windowStart: spikeWindow.windowStart,
    windowSteps: spikeWindow.windowSteps,
  };
  const lanes = buildLanes(pops, layout.height);
  const ticks = computeTicks(spikeWindow.visible(), lanes, layout);
  const ctx = el.raster.getContext("2d");
  if (ctx) drawRaster(ctx, ticks, layout, lanes);

  const tracePop = activePreset.spec.records.find((r) => r.what !== "spikes");
  const tctx = el.trace.getContext("2d");
  if (tctx && tracePop) {
    tctx.clearRect(0, 0, el.trace.width, el.trace.height);
    const series = extractSeries(frames, tracePop.population, tracePop.what, 0);
    const values = series.points.map((p) => p.value);
    const vMin = Math.min(0, ...values);
    const vMax = Math.max(1, ...values);
    const polyline = toPolyline(series, {
      width: el.trace.width,
      height: el.trace.height,
      windowStart: spikeWindow.windowStart,
      windowSteps: spikeWindow.windowSteps,
      vMin,
      vMax,
    });
    drawTrace(tctx, polyline);
  }

  const problems = store.get().streamProblems;
  if (problems.length > 0) banner(`stream integrity warning: ${problems[0]}`);
}

function renderSliders(): void {
  el.sliders.innerHTML = "";
  const state = store.get();
  for (const slider of Object.values(state.sliders)) {
    const row = document.createElement("div");
    row.className = "slider-row";
    const label = document.createElement("label");
    label.textContent = sliderLabel(slider.path);
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(slider.min);
    input.max = String(slider.max);
    input.step = String((slider.max - slider.min) / 200);
    input.value = String(slider.pendingValue ?? slider.ackValue);
    input.disabled = slider.pendingValue !== null;
    const value = document.createElement("span");
    value.textContent = (slider.pendingValue ?? slider.ackValue).toPrecision(3);
    if (slider.pendingValue !== null) value.textContent += " (pending)";
    if (slider.error) {
      row.title = slider.error;
      row.classList.add("errored");
    }
    input.onchange = () => void submitPatch(slider.path, Number(input.value));
    row.append(label, input, value);
    el.sliders.appendChild(row);
  }
}

async function submitPatch(path: string, value: number): Promise<void> {
  const sid = store.get().sessionId;
  if (!sid) return;
  store.dispatch({ kind: "slider-edit", path, value });
  renderSliders();
  try {
    await client.patchParam(sid, path, value);
    store.dispatch({ kind: "patch-acked", path, value });
  } catch (err) {
    const detail = err instanceof ApiError ? err.detail : String(err);
    store.dispatch({ kind: "patch-rejected", path, detail });
  }
  renderSliders();
}

async function refreshStats(): Promise<void> {
  const sid = store.get().sessionId;
  if (!sid || !activePreset) return;
  try {
    const doc = await client.stats(sid, 1000);
    el.stats.textContent = JSON.stringify(doc.stats, null, 1);
    renderBadges(doc.stats);
  } catch {
    // transient; the next tick retries
  }
}

function renderBadges(stats: Record<string, any> | null): void {
  if (!activePreset) return;
  el.badges.innerHTML = "";
  for (const exp of activePreset.expectations) {
    const report = stats ? stats[exp.population] : null;
    const badge = evaluateBadge(exp, metricFromStats(exp.metric, report));
    const span = document.createElement("span");
    span.className = `badge badge-${badge.state}`;
    span.textContent = badge.label;
    span.title = badge.detail;
    el.badges.appendChild(span);
  }
}

function wireControls(): void {
  const pause = document.createElement("button");
  pause.textContent = "pause";
  pause.onclick = () => {
    const sid = store.get().sessionId;
    if (sid) void client.pause(sid);
  };
  const resume = document.createElement("button");
  resume.textContent = "resume";
  resume.onclick = () => {
    const sid = store.get().sessionId;
    if (sid) void client.run(sid);
  };
  const decim = document.createElement("select");
  for (const k of [1, 5, 10, 25, 50]) {
    const opt = document.createElement("option");
    opt.value = String(k);
    opt.textContent = `every ${k} steps`;
    if (k === 10) opt.selected = true;
    decim.appendChild(opt);
  }
  decim.onchange = () => stream?.setDecimation(Number(decim.value));
  el.controls.append(pause, resume, decim);
}

wireControls();
void loadPresets();
