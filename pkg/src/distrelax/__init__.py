"""Relaxation under distributed-order fractional derivatives.

Solves ``D_rho u = -lam u, u(0) = 1`` for a positive measure ``rho`` on
``[0, 1]`` by a spectral (real-inversion) route and a product-integration
time stepper, and provides the kernel, Mittag-Leffler and asymptotic
diagnostics used to check the solution's structure.
"""
from .asymptotics import (AtomSeries, IterLogBound, LogBound, LogPower, PowerTail,
                          StretchedLog, check_bound, drift_trend, envelope_eval,
                          envelope_from_dict, ratio_drift, window_between)
from .errors import (AtomOutOfRange, DistRelaxError, DomainError, EmptyMeasure, EmptyWindow,
                     GridMismatch, InfiniteMass, MassAtZeroOnly, MeasureError,
                     NonMonotoneOutput, NonPositiveWeight, QuadratureFailure)
from .kernel import KernelAccessor
from .measure import (AtomSpec, Constant, GeometricAtoms, MeasureSpec, PowerExponential,
                      PowerLaw, Tabulated, ValidatedMeasure, moment_gf, total_mass, validate)
from .mlf import mittag_leffler_neg, ml_power_tail, relaxation_single_order
from .spectral import (SolutionSeries, SpectralDensity, check_complete_monotonicity,
                       numerical_laplace, solve_spectral, spectral_density_eval)
from .stepping import convolution_weights, richardson_refine, solve_stepping

__version__ = "0.1.0"

__all__ = [
    "AtomSeries", "IterLogBound", "LogBound", "LogPower", "PowerTail", "StretchedLog",
    "check_bound", "drift_trend", "envelope_eval", "envelope_from_dict", "ratio_drift",
    "window_between", "AtomOutOfRange", "DistRelaxError", "DomainError", "EmptyMeasure",
    "EmptyWindow", "GridMismatch", "InfiniteMass", "MassAtZeroOnly", "MeasureError",
    "NonMonotoneOutput", "NonPositiveWeight", "QuadratureFailure", "KernelAccessor",
    "AtomSpec", "Constant", "GeometricAtoms", "MeasureSpec", "PowerExponential", "PowerLaw",
    "Tabulated", "ValidatedMeasure", "moment_gf", "total_mass", "validate",
    "mittag_leffler_neg", "ml_power_tail", "relaxation_single_order", "SolutionSeries",
    "SpectralDensity", "check_complete_monotonicity", "numerical_laplace", "solve_spectral",
    "spectral_density_eval", "convolution_weights", "richardson_refine", "solve_stepping",
]
