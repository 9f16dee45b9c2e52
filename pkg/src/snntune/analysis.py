"""Spike-train statistics: rates, ISI, Fano factor, Poisson conformance,
winner-take-all concentration, and activity damping.

Everything here is a pure, read-only function of a Recording, so repeated
computation always reproduces the stored values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy import stats as sps

from .exceptions import ConfigurationError, InputDomainError
from .recording import Recording

DEFAULT_FANO_WINDOW_MS = 1000.0


@dataclass
class SpikeStatistics:
    """Per-population spike statistics over one recording."""

    population: str
    duration_ms: float
    window_ms: float
    rate_hz: np.ndarray  # per neuron
    isi_mean_ms: np.ndarray  # per neuron, NaN where < 2 spikes
    isi_cv: np.ndarray  # per neuron, NaN where < 2 spikes
    fano: float
    fano_insufficient_data: bool
    concentration: Optional[float]
    rate_profile: np.ndarray  # population mean rate (Hz/neuron) per window
    spike_counts: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    @property
    def mean_rate_hz(self) -> float:
        return float(self.rate_hz.mean()) if self.rate_hz.size else 0.0

    @property
    def isi_cv_mean(self) -> Optional[float]:
        vals = self.isi_cv[~np.isnan(self.isi_cv)]
        return float(vals.mean()) if vals.size else None

    @property
    def isi_mean_ms_mean(self) -> Optional[float]:
        vals = self.isi_mean_ms[~np.isnan(self.isi_mean_ms)]
        return float(vals.mean()) if vals.size else None

    def as_report(self) -> dict:
        return {
            "population": self.population,
            "duration_ms": self.duration_ms,
            "window_ms": self.window_ms,
            "mean_rate_hz": self.mean_rate_hz,
            "isi_mean_ms": self.isi_mean_ms_mean,
            "isi_cv": self.isi_cv_mean,
            "fano": self.fano,
            "fano_insufficient_data": self.fano_insufficient_data,
            "concentration": self.concentration,
            "total_events": int(self.spike_counts.sum()),
            "rate_profile": [float(v) for v in self.rate_profile],
        }


def compute_statistics(
    rec: Recording, pop_id: str, window_ms: float = DEFAULT_FANO_WINDOW_MS
) -> SpikeStatistics:
    """All per-population statistics in one pass over the event list.

    Neurons with fewer than two spikes have their ISI fields set to NaN and
    are excluded from ISI aggregates. The Fano factor pools counts over
    (neuron, window) cells; an empty raster yields fano 0 with the
    insufficient-data flag set.
    """
    if window_ms <= 0:
        raise InputDomainError(f"window_ms must be positive, got {window_ms}")
    ev = rec.events_of(pop_id)
    size = rec.populations[pop_id].size
    n_steps = rec.n_steps
    dt = rec.dt_ms
    duration_s = rec.duration_ms / 1000.0

    counts = rec.spike_counts(pop_id)
    rate_hz = counts / duration_s if duration_s > 0 else np.zeros(size)

    isi_mean = np.full(size, np.nan)
    isi_cv = np.full(size, np.nan)
    if ev.size:
        order = np.lexsort((ev[:, 0], ev[:, 1]))
        steps_sorted = ev[order]
        split_at = np.flatnonzero(np.diff(steps_sorted[:, 1])) + 1
        for chunk in np.split(steps_sorted, split_at):
            neuron = int(chunk[0, 1])
            if chunk.shape[0] >= 2:
                isis = np.diff(chunk[:, 0]) * dt
                isi_mean[neuron] = isis.mean()
                mu = isis.mean()
                isi_cv[neuron] = isis.std() / mu if mu > 0 else 0.0

    steps_per_window = max(int(round(window_ms / dt)), 1)
    n_windows = n_steps // steps_per_window
    if n_windows >= 1 and ev.size:
        win_idx = ev[:, 0] // steps_per_window
        keep = win_idx < n_windows
        flat = win_idx[keep] * size + ev[keep, 1]
        window_counts = np.bincount(flat, minlength=n_windows * size).astype(np.float64)
        mean = window_counts.mean()
        fano = float(window_counts.var() / mean) if mean > 0 else 0.0
        fano_flag = mean == 0
    else:
        window_counts = np.zeros(0)
        fano, fano_flag = 0.0, True

    concentration = _concentration(counts)

    profile = np.zeros(max(n_windows, 0))
    if n_windows >= 1 and ev.size:
        per_window = np.bincount(win_idx[keep], minlength=n_windows).astype(np.float64)
        profile = per_window / size / (steps_per_window * dt / 1000.0)

    return SpikeStatistics(
        population=pop_id,
        duration_ms=rec.duration_ms,
        window_ms=window_ms,
        rate_hz=rate_hz,
        isi_mean_ms=isi_mean,
        isi_cv=isi_cv,
        fano=fano,
        fano_insufficient_data=bool(fano_flag),
        concentration=concentration,
        rate_profile=profile,
        spike_counts=counts,
    )


def _concentration(counts: np.ndarray) -> Optional[float]:
    total = counts.sum()
    if total == 0:
        return None
    # partial deciles round up so uniform activity never drops below 0.1
    n_top = max(1, -(-counts.size // 10))
    # ties broken by neuron index: sort by (count desc, index asc)
    order = np.lexsort((np.arange(counts.size), -counts))
    return float(counts[order[:n_top]].sum() / total)


def wta_index(rec: Recording, pop_id: str) -> Optional[float]:
    """Share of all events emitted by the top decile of neurons by count.

    1.0 means a single-winner regime; 1/n-of-deciles (0.1) means perfectly
    uniform activity. None when the population emitted nothing.
    """
    size = rec.populations[pop_id].size if pop_id in rec.populations else 0
    if size < 10:
        raise ConfigurationError(f"wta_index needs >= 10 neurons, '{pop_id}' has {size}")
    return _concentration(rec.spike_counts(pop_id))


def damping_ratio(rec: Recording, pop_id: str) -> Optional[float]:
    """Events in the second half of the run over events in the first half."""
    if rec.n_steps < 2:
        raise ConfigurationError("damping ratio needs at least two steps")
    ev = rec.events_of(pop_id)
    half = rec.n_steps // 2
    first = int((ev[:, 0] < half).sum()) if ev.size else 0
    second = int((ev[:, 0] >= half).sum()) if ev.size else 0
    if first == 0:
        return None
    return second / first


def isolated_spike_count(rec: Recording, pop_id: str) -> int:
    """Number of neurons that emitted exactly one event (one-off spikers)."""
    return int((rec.spike_counts(pop_id) == 1).sum())


def poisson_conformance(counts: np.ndarray, lam: float) -> Dict[str, float]:
    """Pearson chi-square goodness-of-fit of window counts against Poisson(lam).

    Integer count bins are pooled from both tails (and, if needed, between
    neighbors) until every bin's expected count is at least 5. Returns the
    p-value and the empirical Fano factor.
    """
    counts = np.asarray(counts)
    if counts.size < 100:
        raise InputDomainError(f"need >= 100 windows, got {counts.size}")
    if lam <= 0:
        raise InputDomainError(f"lambda must be positive, got {lam}")
    n = counts.size
    kmax = int(max(counts.max(), math.ceil(lam + 10 * math.sqrt(lam))))
    pmf = sps.poisson.pmf(np.arange(kmax + 1), lam)
    pmf = np.append(pmf, max(1.0 - pmf.sum(), 0.0))  # open upper tail
    expected = n * pmf
    observed = np.bincount(counts.astype(np.int64), minlength=pmf.size).astype(np.float64)

    # pool adjacent bins left to right so each pooled bin has expectation >= 5
    pooled_obs, pooled_exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= 5.0:
            pooled_obs.append(acc_o)
            pooled_exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0:
        if pooled_exp:
            pooled_obs[-1] += acc_o
            pooled_exp[-1] += acc_e
        else:
            pooled_obs.append(acc_o)
            pooled_exp.append(acc_e)

    obs = np.array(pooled_obs)
    exp = np.array(pooled_exp)
    mean = counts.mean()
    fano = float(counts.var() / mean) if mean > 0 else 0.0
    if obs.size < 2:
        return {"p_value": 1.0, "fano": fano}
    chi2 = float(((obs - exp) ** 2 / exp).sum())
    p_value = float(sps.chi2.sf(chi2, obs.size - 1))
    return {"p_value": p_value, "fano": fano}


def statistics_csv_rows(stats_by_pop: Dict[str, SpikeStatistics]) -> list[str]:
    """Flat CSV: one row per (population, metric)."""
    rows = ["population,metric,value"]
    for pop in sorted(stats_by_pop):
        st = stats_by_pop[pop]
        report = st.as_report()
        for metric in (
            "mean_rate_hz",
            "isi_mean_ms",
            "isi_cv",
            "fano",
            "concentration",
            "total_events",
        ):
            value = report[metric]
            rows.append(f"{pop},{metric},{'' if value is None else value}")
    return rows
