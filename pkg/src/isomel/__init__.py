"""First-order Melnikov functions for piecewise-smooth perturbations of the
quadratic isochronous centers S1-S4."""

__version__ = "0.1.0"
