"""Simulation engine: network specs, validation, and the fixed-dt step loop.

Populations update synchronously with a one-step projection delay: within a
global step every population sees the spikes all populations emitted on the
previous step. That makes excitatory/inhibitory loops well-defined and
independent of declaration order.
"""

from __future__ import annotations

import hashlib
import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from . import connectivity, encoders, neurons
from .exceptions import (
    ConfigurationError,
    NumericalDivergenceError,
    SimulationAborted,
)
from .recording import PopulationInfo, Recording

MODELS = ("lif", "raf", "encoder")
RECORD_KINDS = {
    "lif": ("spikes", "voltage", "current", "threshold"),
    "raf": ("spikes", "voltage", "angular"),
    "encoder": ("spikes",),
}
PATCHABLE_LIF = (
    "tau_v", "gamma_v", "v_rest", "R_v", "tau_j", "gamma_j", "kappa",
    "v_reset", "theta_base", "tau_theta", "kappa_theta",
)
PATCHABLE_RAF = ("omega", "b", "tau_v", "tau_c", "R", "v_thr", "v_reset", "c_reset")


# --- declarative spec ---------------------------------------------------------


@dataclass
class EncoderConfig:
    scheme: str  # bernoulli | poisson | phasor | latency
    x: Optional[List[float]] = None
    f_e: float = 0.0
    sigma: float = 0.1
    tau_in: float = 10.0
    v_thr: float = 0.5
    window_ms: Optional[float] = None
    clip_mode: str = "last_step"

    def to_dict(self) -> dict:
        doc = {"scheme": self.scheme}
        if self.x is not None:
            doc["x"] = list(self.x)
        if self.scheme in ("poisson", "phasor"):
            doc["f_e"] = self.f_e
        if self.scheme == "phasor":
            doc["sigma"] = self.sigma
        if self.scheme == "latency":
            doc.update(tau_in=self.tau_in, v_thr=self.v_thr, clip_mode=self.clip_mode)
            if self.window_ms is not None:
                doc["window_ms"] = self.window_ms
        return doc


@dataclass
class PopulationSpec:
    id: str
    size: int
    model: str
    params: dict = field(default_factory=dict)
    encoder: Optional[EncoderConfig] = None
    role: str = "excitatory"

    def to_dict(self) -> dict:
        doc = {"id": self.id, "size": self.size, "model": self.model, "role": self.role}
        if self.params:
            doc["params"] = dict(self.params)
        if self.encoder is not None:
            doc["encoder"] = self.encoder.to_dict()
        return doc


@dataclass
class ProjectionSpec:
    source: str
    target: str
    pattern: str  # identity | hollow | sparse_random | dense
    weight: float
    density: float = 0.8
    id: Optional[str] = None

    def __post_init__(self):
        if self.id is None:
            self.id = f"{self.source}->{self.target}"

    def to_dict(self) -> dict:
        doc = {
            "id": self.id,
            "source": self.source,
            "target": self.target,
            "pattern": self.pattern,
            "weight": self.weight,
        }
        if self.pattern == "sparse_random":
            doc["density"] = self.density
        return doc


@dataclass
class RecordSpec:
    population: str
    what: str  # spikes | voltage | current | threshold | angular

    def to_dict(self) -> dict:
        return {"population": self.population, "what": self.what}


@dataclass
class NetworkSpec:
    dt_ms: float
    duration_ms: float
    seed: int
    populations: List[PopulationSpec] = field(default_factory=list)
    projections: List[ProjectionSpec] = field(default_factory=list)
    records: List[RecordSpec] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dt_ms": self.dt_ms,
            "duration_ms": self.duration_ms,
            "seed": self.seed,
            "populations": [p.to_dict() for p in self.populations],
            "projections": [p.to_dict() for p in self.projections],
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NetworkSpec":
        try:
            populations = []
            for p in doc.get("populations", []):
                enc = None
                if "encoder" in p and p["encoder"] is not None:
                    enc = EncoderConfig(**p["encoder"])
                populations.append(
                    PopulationSpec(
                        id=str(p["id"]),
                        size=int(p["size"]),
                        model=str(p["model"]).lower(),
                        params=dict(p.get("params", {})),
                        encoder=enc,
                        role=p.get("role", "excitatory"),
                    )
                )
            projections = [
                ProjectionSpec(
                    source=str(p["source"]),
                    target=str(p["target"]),
                    pattern=str(p["pattern"]).lower(),
                    weight=float(p["weight"]),
                    density=float(p.get("density", 0.8)),
                    id=p.get("id"),
                )
                for p in doc.get("projections", [])
            ]
            records = [
                RecordSpec(population=str(r["population"]), what=str(r["what"]).lower())
                for r in doc.get("records", [])
            ]
            return cls(
                dt_ms=float(doc["dt_ms"]),
                duration_ms=float(doc["duration_ms"]),
                seed=int(doc["seed"]),
                populations=populations,
                projections=projections,
                records=records,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"malformed network spec: {exc}") from exc

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "NetworkSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def spec_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    @property
    def n_steps(self) -> int:
        return int(round(self.duration_ms / self.dt_ms))


@dataclass
class Diagnostic:
    severity: str  # error | warning
    message: str

    def __str__(self):
        return f"{self.severity}: {self.message}"


def validate(spec: NetworkSpec) -> List[Diagnostic]:
    """Collect every violation and warning rather than stopping at the first."""
    out: List[Diagnostic] = []
    err = lambda msg: out.append(Diagnostic("error", msg))
    warn = lambda msg: out.append(Diagnostic("warning", msg))

    if spec.dt_ms <= 0:
        err(f"dt_ms must be positive, got {spec.dt_ms}")
        return out
    if spec.duration_ms < 0:
        err(f"duration_ms must be non-negative, got {spec.duration_ms}")
    n_steps = round(spec.duration_ms / spec.dt_ms)
    if abs(n_steps * spec.dt_ms - spec.duration_ms) > 1e-6:
        err(f"duration_ms ({spec.duration_ms}) is not an integer multiple of dt_ms ({spec.dt_ms})")

    ids = [p.id for p in spec.populations]
    dupes = {i for i in ids if ids.count(i) > 1}
    for d in sorted(dupes):
        err(f"population id '{d}' is not unique")
    by_id = {p.id: p for p in spec.populations}

    for p in spec.populations:
        if p.size < 1:
            err(f"population '{p.id}' must have size >= 1, got {p.size}")
        if p.model not in MODELS:
            err(f"population '{p.id}' has unknown model '{p.model}'")
            continue
        if p.model == "encoder":
            if p.encoder is None:
                err(f"encoder population '{p.id}' is missing its encoder config")
                continue
            scheme = p.encoder.scheme
            if scheme not in ("bernoulli", "poisson", "phasor", "latency"):
                err(f"population '{p.id}' has unknown encoder scheme '{scheme}'")
                continue
            if scheme in ("bernoulli", "poisson", "latency"):
                if p.encoder.x is None:
                    err(f"encoder population '{p.id}' ({scheme}) needs an intensity vector x")
                elif len(p.encoder.x) != p.size:
                    err(
                        f"encoder population '{p.id}': len(x)={len(p.encoder.x)} "
                        f"does not match size={p.size}"
                    )
            if scheme == "poisson":
                f_hat = p.encoder.f_e * spec.dt_ms / 1000.0
                xs = p.encoder.x or []
                if f_hat > 1.0 or (xs and max(xs) * f_hat > 1.0):
                    warn(
                        f"encoder population '{p.id}': event probability clamps at 1 "
                        f"(f_hat={f_hat:g}); the train degenerates toward every-step spiking"
                    )
            if scheme == "latency":
                window = p.encoder.window_ms if p.encoder.window_ms is not None else spec.duration_ms
                if window <= 0:
                    err(f"encoder population '{p.id}': latency window must be positive")
                else:
                    ratio = window / spec.dt_ms
                    if abs(round(ratio) - ratio) > 1e-9:
                        err(
                            f"encoder population '{p.id}': latency window {window} ms is not "
                            f"an integer number of steps at dt={spec.dt_ms} ms"
                        )
                    if window > spec.duration_ms:
                        warn(
                            f"encoder population '{p.id}': latency window ({window} ms) "
                            f"extends past the run ({spec.duration_ms} ms)"
                        )
        elif p.model == "lif":
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always")
                    lp = neurons.LIFParams(**p.params)
                for w in caught:
                    warn(f"population '{p.id}': {w.message}")
                if spec.dt_ms >= lp.tau_theta:
                    warn(f"population '{p.id}': dt >= tau_theta, threshold decay is unstable")
                if lp.gamma_v > 0 and spec.dt_ms > lp.tau_v / lp.gamma_v:
                    warn(
                        f"population '{p.id}': dt > tau_v/gamma_v, the voltage leak "
                        "overshoots (collapsed dynamics possible)"
                    )
            except (TypeError, ValueError) as exc:
                err(f"population '{p.id}': bad LIF parameters: {exc}")
        elif p.model == "raf":
            try:
                neurons.RAFParams(**p.params)
            except (TypeError, ValueError) as exc:
                err(f"population '{p.id}': bad RAF parameters: {exc}")

    proj_ids = [p.id for p in spec.projections]
    for d in sorted({i for i in proj_ids if proj_ids.count(i) > 1}):
        err(f"projection id '{d}' is not unique")
    for proj in spec.projections:
        for end, name in ((proj.source, "source"), (proj.target, "target")):
            if end not in by_id:
                err(f"projection '{proj.id}' references unknown {name} id '{end}'")
        if proj.target in by_id and by_id[proj.target].model == "encoder":
            err(f"projection '{proj.id}' targets encoder population '{proj.target}'")
        if proj.pattern not in ("identity", "hollow", "sparse_random", "dense"):
            err(f"projection '{proj.id}' has unknown pattern '{proj.pattern}'")
        elif proj.pattern in ("identity", "hollow"):
            if proj.source in by_id and proj.target in by_id:
                a, b = by_id[proj.source].size, by_id[proj.target].size
                if a != b:
                    err(
                        f"projection '{proj.id}' ({proj.pattern}) needs equal sizes, "
                        f"got {a} -> {b}"
                    )
                if proj.pattern == "hollow" and a < 2:
                    err(f"projection '{proj.id}': hollow pattern needs size >= 2")
        elif proj.pattern == "sparse_random" and not (0.0 <= proj.density <= 1.0):
            err(f"projection '{proj.id}': density {proj.density} outside [0, 1]")

    for rec in spec.records:
        if rec.population not in by_id:
            err(f"record references unknown population id '{rec.population}'")
            continue
        model = by_id[rec.population].model
        if model in RECORD_KINDS and rec.what not in RECORD_KINDS[model]:
            err(
                f"record '{rec.what}' is not available for {model} population "
                f"'{rec.population}' (choose from {RECORD_KINDS[model]})"
            )
    return out


def errors_of(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    return [d for d in diagnostics if d.severity == "error"]


# --- runtime ------------------------------------------------------------------


class _EncoderRuntime:
    def __init__(self, pspec: PopulationSpec, spec: NetworkSpec, rng: np.random.Generator):
        cfg = pspec.encoder
        self.id = pspec.id
        self.n = pspec.size
        if cfg.scheme == "bernoulli":
            self.impl = encoders.BernoulliEncoder(np.asarray(cfg.x, dtype=float), rng)
        elif cfg.scheme == "poisson":
            timing = encoders.EncoderTiming(cfg.f_e, spec.dt_ms)
            self.impl = encoders.PoissonEncoder(np.asarray(cfg.x, dtype=float), timing, rng)
        elif cfg.scheme == "phasor":
            timing = encoders.EncoderTiming(cfg.f_e, spec.dt_ms)
            self.impl = encoders.PhasorEncoder(cfg.f_e, pspec.size, cfg.sigma, timing, rng)
        elif cfg.scheme == "latency":
            window = cfg.window_ms if cfg.window_ms is not None else spec.duration_ms
            params = encoders.LatencyParams(
                tau_in=cfg.tau_in,
                v_thr=cfg.v_thr,
                window=window,
                clip_mode=encoders.ClipMode(cfg.clip_mode),
            )
            self.impl = encoders.LatencyEncoder(np.asarray(cfg.x, dtype=float), params, spec.dt_ms)
        else:
            raise ConfigurationError(f"unknown encoder scheme '{cfg.scheme}'")

    def step(self, k: int) -> np.ndarray:
        return self.impl.step(k)


class _NeuronRuntime:
    def __init__(self, pspec: PopulationSpec):
        self.id = pspec.id
        self.n = pspec.size
        self.model = pspec.model
        if pspec.model == "lif":
            self.params = neurons.LIFParams(**pspec.params)
            self.state = neurons.LIFState.zeros(pspec.size, self.params)
        else:
            self.params = neurons.RAFParams(**pspec.params)
            self.state = neurons.RAFState.zeros(pspec.size, self.params)

    def step(self, i_in: np.ndarray, dt: float) -> np.ndarray:
        if self.model == "lif":
            self.state, spikes = neurons.lif_step(self.state, self.params, i_in, dt)
        else:
            self.state, spikes = neurons.raf_step(self.state, self.params, i_in, dt)
        return spikes

    def trace_value(self, what: str) -> np.ndarray:
        if what == "voltage":
            return self.state.v
        if self.model == "lif":
            if what == "current":
                return self.state.j
            if what == "threshold":
                return self.params.theta_base + self.state.theta_hat
        if self.model == "raf" and what == "angular":
            return self.state.c
        raise ConfigurationError(f"trace '{what}' not available for {self.model}")


class _ProjectionRuntime:
    def __init__(self, pspec: ProjectionSpec, sizes: Dict[str, int], rng: np.random.Generator):
        self.spec = pspec
        n_pre, n_post = sizes[pspec.source], sizes[pspec.target]
        if pspec.pattern == "identity":
            self.matrix = connectivity.identity_matrix(n_pre, pspec.weight)
        elif pspec.pattern == "hollow":
            self.matrix = connectivity.hollow_matrix(n_pre, pspec.weight)
        elif pspec.pattern == "sparse_random":
            self.matrix = connectivity.sparse_random(
                n_pre, n_post, pspec.density, pspec.weight, rng
            )
        elif pspec.pattern == "dense":
            self.matrix = connectivity.dense_matrix(n_pre, n_post, pspec.weight)
        else:
            raise ConfigurationError(f"unknown pattern '{pspec.pattern}'")
        self.weight = pspec.weight


class Engine:
    """Owns one network instance and advances it strictly sequentially."""

    def __init__(self, spec: NetworkSpec):
        diags = validate(spec)
        errors = errors_of(diags)
        if errors:
            raise ConfigurationError(
                "invalid network spec: " + "; ".join(d.message for d in errors)
            )
        self.spec = spec
        self.diagnostics = diags
        self.dt = spec.dt_ms
        self.n_steps = spec.n_steps
        self.current_step = 0

        root = np.random.SeedSequence(spec.seed)
        children = root.spawn(len(spec.populations) + len(spec.projections))
        sizes = {p.id: p.size for p in spec.populations}

        self.encoders: Dict[str, _EncoderRuntime] = {}
        self.neuron_pops: Dict[str, _NeuronRuntime] = {}
        self.pop_order: List[str] = []
        for i, p in enumerate(spec.populations):
            rng = np.random.default_rng(children[i])
            if p.model == "encoder":
                self.encoders[p.id] = _EncoderRuntime(p, spec, rng)
            else:
                self.neuron_pops[p.id] = _NeuronRuntime(p)
            self.pop_order.append(p.id)

        self.projections: List[_ProjectionRuntime] = []
        for j, proj in enumerate(spec.projections):
            rng = np.random.default_rng(children[len(spec.populations) + j])
            self.projections.append(_ProjectionRuntime(proj, sizes, rng))
        self.incoming: Dict[str, List[_ProjectionRuntime]] = {pid: [] for pid in self.pop_order}
        for pr in self.projections:
            self.incoming[pr.spec.target].append(pr)

        self.last_spikes: Dict[str, np.ndarray] = {
            pid: np.zeros(sizes[pid], dtype=np.uint8) for pid in self.pop_order
        }

        pop_infos = {
            p.id: PopulationInfo(id=p.id, size=p.size, model=p.model, role=p.role)
            for p in spec.populations
        }
        self._spike_records = [r.population for r in spec.records if r.what == "spikes"]
        self._trace_records = [(r.population, r.what) for r in spec.records if r.what != "spikes"]
        self._event_buffers: Dict[str, list] = {pid: [] for pid in self._spike_records}
        self._trace_buffers: Dict[tuple, np.ndarray] = {
            (pid, what): np.zeros((self.n_steps, sizes[pid])) for pid, what in self._trace_records
        }
        self.recording = Recording(
            meta={
                "spec_hash": spec.spec_hash(),
                "seed": spec.seed,
                "dt_ms": spec.dt_ms,
                "duration_ms": spec.duration_ms,
                "complete": self.n_steps == 0,
                "wall_clock_s": 0.0,
            },
            populations=pop_infos,
        )
        self._finalized = False
        if self.n_steps == 0:
            self._finalize()

    def step(self) -> Dict[str, np.ndarray]:
        """Advance one global step and return the spikes each population emitted."""
        k = self.current_step
        if k >= self.n_steps:
            raise ConfigurationError("run already complete")
        new_spikes: Dict[str, np.ndarray] = {}
        for pid, enc in self.encoders.items():
            new_spikes[pid] = enc.step(k)
        for pid, pop in self.neuron_pops.items():
            i_in = np.zeros(pop.n)
            for pr in self.incoming[pid]:
                i_in += connectivity.propagate(pr.matrix, self.last_spikes[pr.spec.source])
            try:
                new_spikes[pid] = pop.step(i_in, self.dt)
            except NumericalDivergenceError as exc:
                exc.population = pid
                exc.step = k
                raise

        for pid in self._spike_records:
            idx = np.flatnonzero(new_spikes[pid])
            if idx.size:
                buf = self._event_buffers[pid]
                buf.extend((k, int(i)) for i in idx)
        for key in self._trace_records:
            pid, what = key
            self._trace_buffers[key][k] = self.neuron_pops[pid].trace_value(what)

        self.last_spikes = new_spikes
        self.current_step += 1
        if self.current_step == self.n_steps:
            self.recording.meta["complete"] = True
            self._finalize()
        return new_spikes

    def _finalize(self):
        for pid in self._spike_records:
            rows = self._event_buffers[pid]
            self.recording.events[pid] = (
                np.array(rows, dtype=np.int64) if rows else np.empty((0, 2), dtype=np.int64)
            )
        for key, buf in self._trace_buffers.items():
            self.recording.traces[key] = buf[: self.current_step]
        self._finalized = True

    def snapshot_recording(self) -> Recording:
        """Copy of the recording as of the current step (safe to read mid-run)."""
        self._finalize()
        meta = dict(self.recording.meta)
        meta["duration_ms"] = self.current_step * self.dt
        return Recording(
            meta=meta,
            populations=dict(self.recording.populations),
            events={pid: ev.copy() for pid, ev in self.recording.events.items()},
            traces={key: tr.copy() for key, tr in self.recording.traces.items()},
        )

    def apply_patch(self, path: str, value: float, dry_run: bool = False):
        """Set one numeric parameter; takes effect from the next step.

        With dry_run the patch is fully validated (path, value, parameter
        constraints) but nothing is mutated.
        """
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigurationError(f"patch value for '{path}' must be numeric")
        parts = path.split(".")
        if len(parts) == 3 and parts[0] == "projections" and parts[2] == "weight":
            for pr in self.projections:
                if pr.spec.id == parts[1]:
                    try:
                        scaled = pr.matrix.scaled_to(float(value), pr.weight)
                    except ValueError as exc:
                        raise ConfigurationError(str(exc)) from exc
                    if not dry_run:
                        pr.matrix = scaled
                        pr.weight = float(value)
                    return
            raise ConfigurationError(f"unknown projection id '{parts[1]}'")
        if len(parts) == 4 and parts[0] == "populations" and parts[2] == "params":
            pid, name = parts[1], parts[3]
            if pid not in self.neuron_pops:
                raise ConfigurationError(f"unknown neuron population id '{pid}'")
            pop = self.neuron_pops[pid]
            allowed = PATCHABLE_LIF if pop.model == "lif" else PATCHABLE_RAF
            if name not in allowed:
                raise ConfigurationError(
                    f"parameter '{name}' is not live-tunable for {pop.model} populations"
                )
            try:
                new_params = neurons.with_params(pop.params, **{name: float(value)})
            except ValueError as exc:
                raise ConfigurationError(str(exc)) from exc
            if not dry_run:
                pop.params = new_params
            return
        raise ConfigurationError(
            f"unsupported parameter path '{path}' "
            "(use populations.<id>.params.<name> or projections.<id>.weight)"
        )

    def run_to(self, step_limit: Optional[int] = None):
        limit = self.n_steps if step_limit is None else min(step_limit, self.n_steps)
        while self.current_step < limit:
            self.step()


def run(spec: NetworkSpec) -> Recording:
    """Validate, simulate to completion, and return the finalized Recording.

    Divergence mid-run raises SimulationAborted with the partial recording
    (flagged incomplete) attached.
    """
    t0 = time.perf_counter()
    engine = Engine(spec)
    try:
        engine.run_to()
    except NumericalDivergenceError as exc:
        engine._finalize()
        rec = engine.snapshot_recording()
        rec.meta["complete"] = False
        rec.meta["aborted_at_step"] = exc.step
        rec.meta["wall_clock_s"] = time.perf_counter() - t0
        raise SimulationAborted(
            f"diverged in population '{exc.population}' at step {exc.step}: {exc}",
            recording=rec,
            cause=exc,
        ) from exc
    rec = engine.recording
    rec.meta["wall_clock_s"] = time.perf_counter() - t0
    return rec
