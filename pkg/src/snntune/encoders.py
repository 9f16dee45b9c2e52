"""Spike encoders: turn normalized real-valued inputs into binary spike trains.

Four schemes are provided:

* Bernoulli — one weighted coin flip per step, P(spike) = x.
* Poisson process — the Bernoulli flip with the intensity rescaled by the
  expected events-per-step, giving sparse trains whose window counts are
  approximately Poisson.
* Phasor — one rotating phase per neuron; a spike is emitted on every full
  revolution, with the per-neuron rate drawn from a Poisson distribution and
  a small multiplicative velocity jitter de-synchronizing the train.
* Latency — intensity mapped to a single first-spike time through the RC
  charging solution; larger inputs spike earlier.

All encoders emit plain 0/1 numpy vectors and are deterministic given their
numpy Generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .exceptions import ConfigurationError, EmptyPopulationError, InputDomainError

TWO_PI = 2.0 * np.pi


def events_per_step(f_e: float, dt: float) -> float:
    """Expected number of events per integration step for a rate of ``f_e`` Hz.

    ``dt`` is in milliseconds, so a 100 Hz rate at dt=1 ms gives 0.1
    events/step.
    """
    if not (math.isfinite(f_e) and math.isfinite(dt)):
        raise InputDomainError(f"rate and step must be finite, got f_e={f_e}, dt={dt}")
    if f_e < 0:
        raise InputDomainError(f"event rate must be non-negative, got {f_e}")
    if dt <= 0:
        raise InputDomainError(f"time step must be positive, got {dt}")
    return f_e * dt / 1000.0


@dataclass(frozen=True)
class EncoderTiming:
    """Event-rate bookkeeping shared by the probabilistic encoders.

    ``f_hat`` (events/step) is always derived from ``f_e`` (events/second)
    and ``dt`` (ms); construct with the two-argument form and the derived
    field fills itself.
    """

    f_e: float
    dt: float
    f_hat: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "f_hat", events_per_step(self.f_e, self.dt))


def _check_intensity(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InputDomainError(f"intensity must be a 1-d vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputDomainError("intensity contains non-finite values")
    if np.any((x < 0.0) | (x > 1.0)):
        bad = int(np.argmax((x < 0.0) | (x > 1.0)))
        raise InputDomainError(f"intensity must lie in [0, 1]; x[{bad}]={x[bad]}")
    return x


def bernoulli_step(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One Bernoulli trial per neuron: spike with probability exactly x[i]."""
    x = _check_intensity(x)
    return (rng.random(x.size) < x).astype(np.uint8)


def poisson_step(x: np.ndarray, timing: EncoderTiming, rng: np.random.Generator) -> np.ndarray:
    """Poisson-process step: spike with probability min(1, x[i] * f_hat).

    The product is clamped to [0, 1]; at large dt*f_e the per-step
    probability saturates and the train degenerates to every-step spiking
    (the engine's validator warns about such configurations).
    """
    x = _check_intensity(x)
    p = np.minimum(x * timing.f_hat, 1.0)
    return (rng.random(x.size) < p).astype(np.uint8)


@dataclass
class PhasorState:
    """Per-neuron phase, sampled rate, velocity, and jitter scale.

    Invariant: every phase angle stays in [0, 2*pi) after each step, and
    v_n = pi*dt/500 * f_n at construction.
    """

    theta: np.ndarray
    f_n: np.ndarray
    v_n: np.ndarray
    sigma: float


def phasor_init(
    f_e: float,
    n: int,
    sigma: float,
    timing: EncoderTiming,
    rng: np.random.Generator,
) -> PhasorState:
    """Sample per-neuron rates f_n ~ Poisson(f_e) and derive angular velocities.

    Initial phases are uniform on [0, 2*pi) so the population does not start
    artificially synchronized.
    """
    if n < 1:
        raise EmptyPopulationError(f"phasor population needs at least one neuron, got n={n}")
    if sigma < 0:
        raise InputDomainError(f"jitter scale must be non-negative, got {sigma}")
    f_n = rng.poisson(lam=f_e, size=n).astype(np.float64)
    v_n = np.pi * timing.dt / 500.0 * f_n
    theta = rng.uniform(0.0, TWO_PI, size=n)
    return PhasorState(theta=theta, f_n=f_n, v_n=v_n, sigma=sigma)


def phasor_step(state: PhasorState, rng: np.random.Generator) -> np.ndarray:
    """Advance every phase by v_n * eta, eta ~ Normal(1, sigma^2) clamped to [0, 2].

    A phase crossing 2*pi emits a spike and wraps. The multiplicative jitter
    keeps the expected rate at f_n while spreading the inter-spike timing.
    """
    if state.sigma > 0:
        eta = np.clip(rng.normal(1.0, state.sigma, size=state.theta.size), 0.0, 2.0)
        state.theta += state.v_n * eta
    else:
        state.theta += state.v_n
    spikes = state.theta >= TWO_PI
    state.theta[spikes] -= TWO_PI
    # extreme velocities (> 2*pi per step) can overshoot a full extra turn
    still_over = state.theta >= TWO_PI
    if np.any(still_over):
        state.theta[still_over] = np.mod(state.theta[still_over], TWO_PI)
    return spikes.astype(np.uint8)


class ClipMode(str, Enum):
    """What to do with inputs too weak to reach the latency threshold."""

    LAST_STEP = "last_step"
    DROP = "drop"


@dataclass(frozen=True)
class LatencyParams:
    """RC-circuit constants for latency encoding.

    ``tau_in`` is the RC time constant in ms, ``window`` the stimulus
    duration T in ms. ``R`` defaults to 1, folding the resistance into the
    intensity.
    """

    tau_in: float
    v_thr: float
    window: float
    R: float = 1.0
    clip_mode: ClipMode = ClipMode.LAST_STEP

    def __post_init__(self):
        if self.tau_in <= 0:
            raise ConfigurationError(f"tau_in must be positive, got {self.tau_in}")
        if self.v_thr <= 0:
            raise ConfigurationError(f"v_thr must be positive, got {self.v_thr}")
        if self.window <= 0:
            raise ConfigurationError(f"window must be positive, got {self.window}")


def latency_spike_time(i_in: float, p: LatencyParams) -> Optional[float]:
    """First-spike time (ms) for an input treated as constant RC charging current.

    Returns None (the clip sentinel) when the steady-state voltage i_in * R
    never reaches the threshold.
    """
    if not math.isfinite(i_in):
        raise InputDomainError(f"intensity must be finite, got {i_in}")
    if i_in < 0:
        raise InputDomainError(f"intensity must be non-negative, got {i_in}")
    drive = i_in * p.R
    if drive <= p.v_thr:
        return None
    return p.tau_in * math.log(drive / (drive - p.v_thr))


def latency_encode(x: np.ndarray, p: LatencyParams, dt: float) -> np.ndarray:
    """Encode an intensity vector into a (window/dt, n) binary train.

    Each column holds at most one spike, at round(t/dt). Clipped inputs (and
    spike times falling past the window) go to the final step or are dropped,
    per ``clip_mode``.
    """
    x = np.asarray(x, dtype=np.float64)
    n_steps_f = p.window / dt
    n_steps = int(round(n_steps_f))
    if abs(n_steps_f - n_steps) > 1e-9 or n_steps < 1:
        raise ConfigurationError(
            f"window ({p.window} ms) must be an integer number of steps at dt={dt} ms"
        )
    train = np.zeros((n_steps, x.size), dtype=np.uint8)
    for i, intensity in enumerate(x):
        t = latency_spike_time(float(intensity), p)
        if t is not None:
            idx = int(round(t / dt))
            if idx >= n_steps:
                t = None
        if t is None:
            if p.clip_mode is ClipMode.LAST_STEP:
                train[n_steps - 1, i] = 1
            continue
        train[idx, i] = 1
    return train


# --- stepping adapters -------------------------------------------------------
#
# The engine drives every encoder through the same tiny interface: construct
# once with its own Generator, then call step() once per tick.


class BernoulliEncoder:
    def __init__(self, x: np.ndarray, rng: np.random.Generator):
        self.x = _check_intensity(x)
        self.n = self.x.size
        self.rng = rng

    def step(self, step_index: int) -> np.ndarray:
        return bernoulli_step(self.x, self.rng)


class PoissonEncoder:
    def __init__(self, x: np.ndarray, timing: EncoderTiming, rng: np.random.Generator):
        self.x = _check_intensity(x)
        self.n = self.x.size
        self.timing = timing
        self.rng = rng

    def step(self, step_index: int) -> np.ndarray:
        return poisson_step(self.x, self.timing, self.rng)


class PhasorEncoder:
    def __init__(
        self,
        f_e: float,
        n: int,
        sigma: float,
        timing: EncoderTiming,
        rng: np.random.Generator,
    ):
        self.n = n
        self.rng = rng
        self.state = phasor_init(f_e, n, sigma, timing, rng)

    def step(self, step_index: int) -> np.ndarray:
        return phasor_step(self.state, self.rng)


class LatencyEncoder:
    """Plays back the precomputed one-spike-per-neuron train, then stays silent."""

    def __init__(self, x: np.ndarray, params: LatencyParams, dt: float):
        self.train = latency_encode(x, params, dt)
        self.n = self.train.shape[1]

    def step(self, step_index: int) -> np.ndarray:
        if 0 <= step_index < self.train.shape[0]:
            return self.train[step_index]
        return np.zeros(self.n, dtype=np.uint8)
