"""snntune: a discrete-time spiking-neuron simulator and tuning workbench."""

__version__ = "0.1.0"
