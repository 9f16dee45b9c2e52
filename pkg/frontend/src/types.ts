// Wire formats of the tuning service. The dashboard never derives simulation
// state on its own; everything below is produced by the server.

export interface SpikeEvent {
  pop: string;
  step: number;
  neuron: number;
}

export interface Frame {
  type: "frame";
  seq: number;
  step: number;
  t_ms: number;
  spikes: Record<string, [number, number][]>;
  traces: Record<string, Record<string, number[]>>;
}

export interface EndMarker {
  type: "end";
  reason: string;
  seq: number;
}

export type StreamMessage = Frame | EndMarker;

export interface SessionInfo {
  id: string;
  status: "idle" | "running" | "paused" | "done" | "failed";
  step: number;
  t_ms: number;
  n_steps: number;
  dt_ms: number;
  decimation: number;
  error: string | null;
  frame_count: number;
}

export interface PopulationSpec {
  id: string;
  size: number;
  model: string;
  role?: string;
}

export interface NetworkSpecDoc {
  dt_ms: number;
  duration_ms: number;
  seed: number;
  populations: PopulationSpec[];
  projections: { id: string; source: string; target: string; pattern: string; weight: number }[];
  records: { population: string; what: string }[];
}

export interface ExpectationDoc {
  metric: string;
  population: string;
  op: string;
  value?: number;
  baseline?: string;
  params?: Record<string, number>;
}

export interface PresetDoc {
  name: string;
  description: string;
  spec: NetworkSpecDoc;
  expectations: ExpectationDoc[];
  calibrated: {
    notes: string;
    tunable_ranges: Record<string, [number, number]>;
  };
}

export interface StatsReport {
  population: string;
  mean_rate_hz: number;
  isi_cv: number | null;
  fano: number;
  concentration: number | null;
  total_events: number;
  rate_profile: number[];
}
