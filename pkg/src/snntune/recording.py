"""Run recordings: spike event lists, state traces, and their file exports.

Spikes are kept as sparse (step, neuron) event arrays and continuous traces
as dense float arrays, so memory stays proportional to activity. Exports are
deterministic functions of the recording content: identical recordings
produce byte-identical artifact files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from .exceptions import ConfigurationError

EXPORT_FORMATS = ("ndjson", "csv", "svg")


@dataclass
class PopulationInfo:
    id: str
    size: int
    model: str  # lif | raf | encoder
    role: str = "excitatory"  # raster tick color: excitatory=black, inhibitory=red


@dataclass
class Recording:
    """Time-indexed spike rasters and state traces plus run metadata."""

    meta: dict
    populations: Dict[str, PopulationInfo]
    events: Dict[str, np.ndarray] = field(default_factory=dict)  # (k, 2) [step, neuron]
    traces: Dict[Tuple[str, str], np.ndarray] = field(default_factory=dict)

    @property
    def dt_ms(self) -> float:
        return self.meta["dt_ms"]

    @property
    def duration_ms(self) -> float:
        return self.meta["duration_ms"]

    @property
    def n_steps(self) -> int:
        return int(round(self.meta["duration_ms"] / self.meta["dt_ms"]))

    def population(self, pop_id: str) -> PopulationInfo:
        if pop_id not in self.populations:
            raise ConfigurationError(f"unknown population id '{pop_id}'")
        return self.populations[pop_id]

    def events_of(self, pop_id: str) -> np.ndarray:
        self.population(pop_id)
        if pop_id not in self.events:
            raise ConfigurationError(f"population '{pop_id}' has no recorded spikes")
        return self.events[pop_id]

    def spike_counts(self, pop_id: str) -> np.ndarray:
        ev = self.events_of(pop_id)
        size = self.populations[pop_id].size
        counts = np.zeros(size, dtype=np.int64)
        if ev.size:
            np.add.at(counts, ev[:, 1], 1)
        return counts

    def total_events(self) -> int:
        return sum(int(ev.shape[0]) for ev in self.events.values())

    def window(self, t0_ms: float, t1_ms: float) -> "Recording":
        """Sub-recording restricted to steps with t0_ms <= t < t1_ms."""
        lo = int(np.ceil(t0_ms / self.dt_ms - 1e-9))
        hi = int(np.ceil(t1_ms / self.dt_ms - 1e-9))
        meta = dict(self.meta)
        meta["duration_ms"] = (hi - lo) * self.dt_ms
        events = {}
        for pop, ev in self.events.items():
            if ev.size:
                keep = (ev[:, 0] >= lo) & (ev[:, 0] < hi)
                sliced = ev[keep].copy()
                sliced[:, 0] -= lo
                events[pop] = sliced
            else:
                events[pop] = ev.copy()
        traces = {key: tr[lo:hi] for key, tr in self.traces.items()}
        return Recording(meta=meta, populations=dict(self.populations), events=events, traces=traces)

    def dense_raster(self, pop_id: str) -> np.ndarray:
        ev = self.events_of(pop_id)
        out = np.zeros((self.n_steps, self.populations[pop_id].size), dtype=np.uint8)
        if ev.size:
            out[ev[:, 0], ev[:, 1]] = 1
        return out


def _float_repr(x: float) -> str:
    # shortest round-trip repr; integers render without a trailing ".0" noise
    if float(x) == int(x):
        return str(int(x))
    return repr(float(x))


def write_ndjson(rec: Recording, path: Path) -> Path:
    """One event per line: {"t_ms": ..., "population": ..., "neuron": ...}.

    Lines are ordered by step, then population id, then neuron index.
    """
    path = Path(path)
    rows = []
    for pop in sorted(rec.events):
        ev = rec.events[pop]
        for step, neuron in ev:
            rows.append((int(step), pop, int(neuron)))
    rows.sort()
    with path.open("w") as fh:
        for step, pop, neuron in rows:
            t_ms = step * rec.dt_ms
            fh.write(
                '{"t_ms": %s, "population": "%s", "neuron": %d}\n'
                % (_float_repr(t_ms), pop, neuron)
            )
    return path


def write_csv(rec: Recording, out_dir: Path) -> list[Path]:
    """Dense per-population spike matrices and per-variable trace matrices."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for pop in sorted(rec.events):
        dense = rec.dense_raster(pop)
        p = out_dir / f"spikes_{pop}.csv"
        header = ",".join(f"n{i}" for i in range(dense.shape[1]))
        np.savetxt(p, dense, fmt="%d", delimiter=",", header=header, comments="")
        paths.append(p)
    for (pop, var), tr in sorted(rec.traces.items()):
        p = out_dir / f"trace_{pop}_{var}.csv"
        header = ",".join(f"n{i}" for i in range(tr.shape[1]))
        np.savetxt(p, tr, fmt="%.17g", delimiter=",", header=header, comments="")
        paths.append(p)
    return paths


def load_raster_csv(path: Path) -> np.ndarray:
    """Inverse of the spike-matrix export: returns the dense 0/1 matrix."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    return data.astype(np.uint8)


def write_svg_raster(rec: Recording, path: Path) -> Path:
    """Raster figure: one lane per population, black excitatory ticks, red inhibitory."""
    path = Path(path)
    width, lane_h, pad = 900.0, 140.0, 40.0
    pops = sorted(rec.events)
    height = pad * 2 + lane_h * max(len(pops), 1)
    n_steps = max(rec.n_steps, 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for lane, pop in enumerate(pops):
        info = rec.populations[pop]
        color = "red" if info.role == "inhibitory" else "black"
        y0 = pad + lane * lane_h
        parts.append(
            f'<text x="4" y="{y0 + 12:.1f}" font-size="12" font-family="sans-serif">{pop}</text>'
        )
        parts.append(
            f'<line x1="{pad:.1f}" y1="{y0 + lane_h - 18:.1f}" x2="{width - 10:.1f}" '
            f'y2="{y0 + lane_h - 18:.1f}" stroke="#999" stroke-width="0.5"/>'
        )
        usable_h = lane_h - 30.0
        size = max(info.size, 1)
        for step, neuron in rec.events[pop]:
            x = pad + (width - pad - 10.0) * (int(step) / n_steps)
            y = y0 + usable_h * (1.0 - int(neuron) / size)
            parts.append(
                f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{x:.2f}" y2="{y + 4.0:.2f}" '
                f'stroke="{color}" stroke-width="1"/>'
            )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
    return path


def write_meta(rec: Recording, path: Path) -> Path:
    """Run metadata sidecar; includes wall clock, so it is not byte-reproducible."""
    path = Path(path)
    doc = dict(rec.meta)
    doc["populations"] = [
        {"id": p.id, "size": p.size, "model": p.model, "role": p.role}
        for p in rec.populations.values()
    ]
    doc["recorded_spikes"] = sorted(rec.events)
    doc["recorded_traces"] = sorted(f"{pop}:{var}" for pop, var in rec.traces)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def export(rec: Recording, fmt: str, out_dir: Path) -> list[Path]:
    """Write one export format into out_dir and return the files created."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "ndjson":
        return [write_ndjson(rec, out_dir / "events.ndjson")]
    if fmt == "csv":
        return write_csv(rec, out_dir)
    if fmt == "svg":
        return [write_svg_raster(rec, out_dir / "raster.svg")]
    raise ConfigurationError(f"unknown export format '{fmt}' (choose from {EXPORT_FORMATS})")


def load_recording(out_dir: Path) -> Recording:
    """Rebuild a Recording from a run directory (meta.json + events.ndjson)."""
    out_dir = Path(out_dir)
    meta_path = out_dir / "meta.json"
    events_path = out_dir / "events.ndjson"
    if not meta_path.exists() or not events_path.exists():
        raise ConfigurationError(f"{out_dir} does not contain meta.json and events.ndjson")
    doc = json.loads(meta_path.read_text())
    populations = {
        p["id"]: PopulationInfo(id=p["id"], size=p["size"], model=p["model"], role=p["role"])
        for p in doc.pop("populations")
    }
    recorded = doc.pop("recorded_spikes")
    doc.pop("recorded_traces", None)
    rec = Recording(meta=doc, populations=populations)
    buckets: Dict[str, list] = {pop: [] for pop in recorded}
    dt = rec.dt_ms
    with events_path.open() as fh:
        for line in fh:
            if not line.strip():
                continue
            ev = json.loads(line)
            step = int(round(ev["t_ms"] / dt))
            buckets[ev["population"]].append((step, ev["neuron"]))
    for pop in recorded:
        rows = buckets.get(pop, [])
        rec.events[pop] = (
            np.array(rows, dtype=np.int64) if rows else np.empty((0, 2), dtype=np.int64)
        )
    return rec
