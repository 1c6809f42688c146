"""Radial defocusing quintic wave equation with a potential: solvers, steady states, spectra."""

__version__ = "0.1.0"
