"""Discrete-time LIF and RAF neuron updates, plus closed-form decay math.

Both models step with explicit forward Euler at a fixed dt (ms), in the
order current -> voltage -> spike -> reset -> threshold. The update
functions are pure: they return fresh state arrays and never touch an RNG,
so identical inputs give identical outputs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from .exceptions import (
    CollapsedDynamicsWarning,
    ConfigurationError,
    InputDomainError,
    NumericalDivergenceError,
)


# --- closed-form helpers -----------------------------------------------------


def decay_ratio_for_fraction(fraction: float, dt: float) -> float:
    """gamma/tau ratio (1/ms) that decays a value to ``fraction`` of itself in dt ms.

    Solving 0.1 = exp(-gamma*dt/tau) for gamma/tau gives -ln(0.1)/dt, i.e.
    roughly 2.3/dt for a decay to 10%.
    """
    if not (0.0 < fraction < 1.0):
        raise InputDomainError(f"fraction must be in (0, 1), got {fraction}")
    if dt <= 0:
        raise InputDomainError(f"dt must be positive, got {dt}")
    return -math.log(fraction) / dt


def closed_form_decay(phi0: float, t0: float, t: float, tau: float, gamma: float = 1.0) -> float:
    """Analytical solution phi(t) = phi0 * exp(gamma*(t0 - t)/tau).

    This is the oracle the Euler simulations are checked against.
    """
    if tau <= 0:
        raise InputDomainError(f"tau must be positive, got {tau}")
    if t < t0:
        raise InputDomainError(f"t must be >= t0, got t={t}, t0={t0}")
    return phi0 * math.exp(gamma * (t0 - t) / tau)


def scaled_resistance(tau_v: float, r_prime: float) -> float:
    """Resistance under the R_v = tau_v * R_v' convention.

    Scaling R with the time constant keeps the steady-state voltage under a
    constant current independent of tau_v.
    """
    if tau_v <= 0:
        raise InputDomainError(f"tau_v must be positive, got {tau_v}")
    return tau_v * r_prime


# --- LIF ----------------------------------------------------------------------


@dataclass(frozen=True)
class LIFParams:
    """Leaky integrate-and-fire constants.

    Defaults satisfy all documented invariants and are overridable
    everywhere. ``R_v=None`` resolves to tau_v (the R_v = tau_v * R_v'
    convention with R_v' = 1).
    """

    tau_v: float = 10.0
    gamma_v: float = 1.0
    v_rest: float = 0.0
    R_v: float = None  # type: ignore[assignment]
    tau_j: float = 5.0
    gamma_j: float = 1.0
    kappa: float = 1.0
    v_reset: float = 0.0
    theta_base: float = 1.0
    tau_theta: float = 100.0
    kappa_theta: float = 0.1

    def __post_init__(self):
        if self.R_v is None:
            object.__setattr__(self, "R_v", self.tau_v)
        for name in ("tau_v", "tau_j", "tau_theta"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.theta_base <= self.v_reset:
            warnings.warn(
                f"theta_base ({self.theta_base}) <= v_reset ({self.v_reset}): "
                "the neuron will spike every step (collapsed dynamics)",
                CollapsedDynamicsWarning,
                stacklevel=2,
            )


@dataclass
class LIFState:
    """Membrane voltage, synaptic current, and homeostatic threshold offset."""

    v: np.ndarray
    j: np.ndarray
    theta_hat: np.ndarray

    @classmethod
    def zeros(cls, n: int, p: LIFParams) -> "LIFState":
        return cls(
            v=np.full(n, p.v_rest, dtype=np.float64),
            j=np.zeros(n, dtype=np.float64),
            theta_hat=np.zeros(n, dtype=np.float64),
        )


def lif_step(
    state: LIFState, p: LIFParams, i_in: np.ndarray, dt: float
) -> Tuple[LIFState, np.ndarray]:
    """One forward-Euler LIF step.

    Order: current integrates the input, voltage integrates the current,
    spikes are evaluated against theta_base + theta_hat, spiking neurons
    reset to v_reset, and the homeostatic offset decays and jumps by
    kappa_theta*dt per spike.
    """
    if dt <= 0:
        raise InputDomainError(f"dt must be positive, got {dt}")
    i_in = np.asarray(i_in, dtype=np.float64)
    if not np.all(np.isfinite(i_in)):
        raise InputDomainError("input current contains non-finite values")

    j = state.j + dt / p.tau_j * (-p.gamma_j * state.j + p.kappa * i_in)
    v = state.v + dt / p.tau_v * (-p.gamma_v * (state.v - p.v_rest) + p.R_v * j)
    spikes = v > (p.theta_base + state.theta_hat)
    v = np.where(spikes, p.v_reset, v)
    theta_hat = state.theta_hat + dt * (
        -state.theta_hat / p.tau_theta + p.kappa_theta * spikes
    )
    np.maximum(theta_hat, 0.0, out=theta_hat)  # only reachable when dt >= tau_theta

    bad = ~(np.isfinite(v) & np.isfinite(j) & np.isfinite(theta_hat))
    if np.any(bad):
        idx = np.flatnonzero(bad)
        raise NumericalDivergenceError(
            f"LIF state non-finite for neurons {idx[:8].tolist()}", neuron_indices=idx
        )
    return LIFState(v=v, j=j, theta_hat=theta_hat), spikes.astype(np.uint8)


# --- RAF ----------------------------------------------------------------------


@dataclass(frozen=True)
class RAFParams:
    """Resonate-and-fire constants.

    ``omega`` is configured in cycles/second and converted internally to
    rad/ms (omega_hat), so the eigenperiod 2*pi/omega_hat comes out in ms.
    With tau_v = tau_c = tau the subthreshold rotation period is
    tau * eigenperiod; the shipped presets use tau = 1 so the two coincide.
    """

    omega: float
    b: float
    tau_v: float = 1.0
    tau_c: float = 1.0
    R: float = 1.0
    v_thr: float = 1.0
    v_reset: float = 0.0
    c_reset: float = 0.0
    omega_hat: float = field(init=False)

    def __post_init__(self):
        if self.b >= 0:
            raise ConfigurationError(f"dampening factor b must be negative, got {self.b}")
        if self.omega == 0:
            raise ConfigurationError("omega must be non-zero")
        for name in ("tau_v", "tau_c"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        object.__setattr__(self, "omega_hat", 2.0 * math.pi * self.omega / 1000.0)

    @property
    def eigenperiod_ms(self) -> float:
        """Subthreshold oscillation period 2*pi/omega_hat (= 1000/omega ms)."""
        return 2.0 * math.pi / abs(self.omega_hat)


@dataclass
class RAFState:
    """Voltage-like and current-like oscillator variables."""

    v: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, n: int, p: RAFParams) -> "RAFState":
        return cls(v=np.zeros(n, dtype=np.float64), c=np.zeros(n, dtype=np.float64))


def raf_step(
    state: RAFState, p: RAFParams, i_in: np.ndarray, dt: float
) -> Tuple[RAFState, np.ndarray]:
    """One forward-Euler RAF step.

    The injected current is pre-scaled by tau_v/dt, which makes the kick a
    single-step spike delivers independent of the step size. Spiking resets
    both variables to their configured base values.
    """
    if dt <= 0:
        raise InputDomainError(f"dt must be positive, got {dt}")
    i_in = np.asarray(i_in, dtype=np.float64)
    if not np.all(np.isfinite(i_in)):
        raise InputDomainError("input current contains non-finite values")

    j = (p.tau_v / dt) * i_in
    # sequential update: the voltage integrates the already-updated c, the
    # same in-place ordering the LIF uses for its current -> voltage pair
    c = state.c + dt / p.tau_c * (state.c * p.b - state.v * p.omega_hat + p.R * j)
    v = state.v + dt / p.tau_v * (p.omega_hat * c + state.v * p.b)
    spikes = v > p.v_thr
    v = np.where(spikes, p.v_reset, v)
    c = np.where(spikes, p.c_reset, c)

    bad = ~(np.isfinite(v) & np.isfinite(c))
    if np.any(bad):
        idx = np.flatnonzero(bad)
        raise NumericalDivergenceError(
            f"RAF state non-finite for neurons {idx[:8].tolist()}", neuron_indices=idx
        )
    return RAFState(v=v, c=c), spikes.astype(np.uint8)


def with_params(params, **overrides):
    """Dataclass-safe parameter replacement (used by live tuning)."""
    return replace(params, **overrides)
