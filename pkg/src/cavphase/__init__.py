"""Distributed cavity phase (DCP) errors of atomic fountain clocks.

Computes microwave fields of TE011 clock cavities (analytic closed-cavity
solution and an axisymmetric Fourier-mode finite-element solver), propagates
atomic ensembles through them, and evaluates transition-probability
perturbations and clock frequency shifts versus microwave amplitude, feed
configuration, and cavity geometry.
"""

__version__ = "0.1.0"
