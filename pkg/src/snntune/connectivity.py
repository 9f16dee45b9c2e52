"""Synaptic wiring patterns and spike-to-current propagation.

Three patterns cover the excitatory/inhibitory assemblies studied here:
identity (one-to-one), hollow (one-to-many, zero diagonal), and sparse
random (dense draw with a dropout mask, the 80:20 wiring). Matrices are
stored dense; population sizes in scope make a dense gated sum both simpler
and faster than sparse formats.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .exceptions import ConfigurationError, InputDomainError


class Sign(str, Enum):
    EXCITATORY = "excitatory"
    INHIBITORY = "inhibitory"


class Pattern(str, Enum):
    IDENTITY = "identity"
    HOLLOW = "hollow"
    SPARSE_RANDOM = "sparse_random"
    DENSE = "dense"


class Wiring(str, Enum):
    """E/I assembly wiring variants (exc->inh pattern, inh->exc pattern)."""

    ONE_TO_ONE_ONE_TO_MANY = "one_to_one_one_to_many"
    ONE_TO_MANY_ONE_TO_ONE = "one_to_many_one_to_one"
    SPARSE_80_20 = "sparse_80_20"


@dataclass
class SynapseMatrix:
    """Dense (pre x post) weight matrix with its sign and pattern tags."""

    weights: np.ndarray
    sign: Sign
    pattern: Pattern

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2:
            raise ConfigurationError(f"weights must be 2-d, got shape {self.weights.shape}")
        self.validate()

    @property
    def n_pre(self) -> int:
        return self.weights.shape[0]

    @property
    def n_post(self) -> int:
        return self.weights.shape[1]

    def validate(self):
        """Enforce sign discipline and the structural pattern invariants."""
        w = self.weights
        if self.sign is Sign.EXCITATORY and np.any(w < 0):
            raise ConfigurationError("excitatory matrix has negative weights")
        if self.sign is Sign.INHIBITORY and np.any(w > 0):
            raise ConfigurationError("inhibitory matrix has positive weights")
        if self.pattern is Pattern.IDENTITY:
            off = w[~np.eye(w.shape[0], w.shape[1], dtype=bool)]
            if off.size and np.any(off != 0):
                raise ConfigurationError("identity matrix has off-diagonal weights")
        if self.pattern is Pattern.HOLLOW:
            if np.any(np.diagonal(w) != 0):
                raise ConfigurationError("hollow matrix has non-zero diagonal")

    def scaled_to(self, weight: float, old_weight: float) -> "SynapseMatrix":
        """Uniformly rescale all entries by weight/old_weight (live tuning)."""
        if old_weight == 0:
            raise InputDomainError("cannot rescale a matrix built with zero weight")
        factor = weight / old_weight
        if factor < 0:
            raise InputDomainError("rescaling must not flip the matrix sign")
        return SynapseMatrix(self.weights * factor, self.sign, self.pattern)


def _sign_of(w: float) -> Sign:
    return Sign.INHIBITORY if w < 0 else Sign.EXCITATORY


def identity_matrix(n: int, w: float) -> SynapseMatrix:
    """One-to-one wiring: w on the diagonal, zero elsewhere."""
    if n < 1:
        raise ConfigurationError(f"identity matrix needs n >= 1, got {n}")
    return SynapseMatrix(np.eye(n) * w, _sign_of(w), Pattern.IDENTITY)


def hollow_matrix(n: int, w: float) -> SynapseMatrix:
    """One-to-many wiring: zero diagonal, w everywhere else."""
    if n < 2:
        raise ConfigurationError(f"hollow matrix needs n >= 2, got {n}")
    weights = np.full((n, n), float(w))
    np.fill_diagonal(weights, 0.0)
    return SynapseMatrix(weights, _sign_of(w), Pattern.HOLLOW)


def sparse_random(
    n_pre: int,
    n_post: int,
    density: float,
    w: float,
    rng: np.random.Generator,
    w_dist: Optional[Callable[[np.random.Generator, tuple], np.ndarray]] = None,
) -> SynapseMatrix:
    """Each entry is independently present with probability ``density``.

    Present entries draw their magnitude from ``w_dist`` (default: uniform on
    (0, |w|]) and take the sign of ``w``.
    """
    if not (0.0 <= density <= 1.0):
        raise InputDomainError(f"density must be in [0, 1], got {density}")
    if n_pre < 1 or n_post < 1:
        raise ConfigurationError(f"matrix needs positive sizes, got {n_pre}x{n_post}")
    shape = (n_pre, n_post)
    mask = rng.random(shape) < density
    if w_dist is not None:
        magnitudes = np.abs(w_dist(rng, shape))
    else:
        magnitudes = (1.0 - rng.random(shape)) * abs(w)  # uniform on (0, |w|]
    weights = np.where(mask, np.sign(w) * magnitudes, 0.0)
    return SynapseMatrix(weights, _sign_of(w), Pattern.SPARSE_RANDOM)


def dense_matrix(n_pre: int, n_post: int, w: float) -> SynapseMatrix:
    """Fully connected wiring at a uniform weight."""
    if n_pre < 1 or n_post < 1:
        raise ConfigurationError(f"matrix needs positive sizes, got {n_pre}x{n_post}")
    return SynapseMatrix(np.full((n_pre, n_post), float(w)), _sign_of(w), Pattern.DENSE)


def propagate(m: SynapseMatrix, spikes: np.ndarray) -> np.ndarray:
    """Post-synaptic current: the sum of weight rows whose pre-neuron spiked.

    Rows accumulate in pre-neuron order, so the result is bit-identical to a
    scalar loop over the gated sum.
    """
    spikes = np.asarray(spikes)
    if spikes.shape != (m.n_pre,):
        raise ConfigurationError(
            f"spike vector has shape {spikes.shape}, expected ({m.n_pre},)"
        )
    if spikes.dtype != np.bool_ and np.any((spikes != 0) & (spikes != 1)):
        raise InputDomainError("spike vector must be binary")
    out = np.zeros(m.n_post, dtype=np.float64)
    for i in np.flatnonzero(spikes):
        out += m.weights[i]
    return out


def ei_assembly(
    n_exc: int,
    n_inh: int,
    wiring: Wiring,
    w_ei: float,
    w_ie: float,
    rng: Optional[np.random.Generator] = None,
    density: float = 0.8,
) -> tuple[SynapseMatrix, SynapseMatrix]:
    """Build the (exc->inh, inh->exc) matrix pair for one wiring variant.

    The one-to-one variants require equal population sizes; the sparse 80:20
    variant masks dense draws at the given density in both directions.
    """
    if w_ei < 0:
        raise InputDomainError(f"exc->inh weight must be >= 0, got {w_ei}")
    if w_ie > 0:
        raise InputDomainError(f"inh->exc weight must be <= 0, got {w_ie}")
    if wiring in (Wiring.ONE_TO_ONE_ONE_TO_MANY, Wiring.ONE_TO_MANY_ONE_TO_ONE):
        if n_exc != n_inh:
            raise ConfigurationError(
                f"one-to-one wiring requires equal sizes, got exc={n_exc}, inh={n_inh}"
            )
    if wiring is Wiring.ONE_TO_ONE_ONE_TO_MANY:
        return identity_matrix(n_exc, w_ei), hollow_matrix(n_inh, w_ie)
    if wiring is Wiring.ONE_TO_MANY_ONE_TO_ONE:
        return hollow_matrix(n_exc, w_ei), identity_matrix(n_inh, w_ie)
    if wiring is Wiring.SPARSE_80_20:
        if rng is None:
            raise ConfigurationError("sparse wiring needs an rng")
        exc_to_inh = sparse_random(n_exc, n_inh, density, w_ei, rng)
        inh_to_exc = sparse_random(n_inh, n_exc, density, w_ie, rng)
        return exc_to_inh, inh_to_exc
    raise ConfigurationError(f"unknown wiring {wiring}")
