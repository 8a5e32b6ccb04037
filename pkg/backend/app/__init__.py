"""Order-selective nonlinearity removal for modulated interferograms."""

__version__ = "0.1.0"
