"""Well-balanced finite-volume shallow water solver for rainfall-runoff."""

__version__ = "0.1.0"
