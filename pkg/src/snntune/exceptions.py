"""Exception types shared across the simulator."""


class InputDomainError(ValueError):
    """An input value is outside the domain an operation accepts."""


class ConfigurationError(ValueError):
    """A structural configuration problem (shapes, divisibility, unknown ids)."""


class EmptyPopulationError(ConfigurationError):
    """A population of size zero was requested where at least one unit is needed."""


class NumericalDivergenceError(RuntimeError):
    """State became non-finite during integration.

    Carries enough context to locate the blow-up: which neurons, and when
    the engine caught it.
    """

    def __init__(self, message, neuron_indices=None, population=None, step=None):
        super().__init__(message)
        self.neuron_indices = list(neuron_indices) if neuron_indices is not None else []
        self.population = population
        self.step = step


class SimulationAborted(RuntimeError):
    """A run stopped mid-way; the partial recording is attached."""

    def __init__(self, message, recording=None, cause=None):
        super().__init__(message)
        self.recording = recording
        self.cause = cause


class CollapsedDynamicsWarning(UserWarning):
    """Configuration is mathematically valid but qualitatively degenerate."""
