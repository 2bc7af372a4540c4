"""Information field dynamics simulation of the 1-D periodic Burgers equation.

Stored numbers are treated as measurement data about an unknown
continuous field; updates evolve that data with minimal information
loss, given a stationary Gaussian prior.  The package provides the
box-grid and Fourier-grid schemes, a finite-difference baseline, the
no-noise filtered reconstruction, and an experiment harness.
"""

from ifdsim.domain import (FineField, PeriodicDomain, SpectralField,
                           circular_convolve, dft, idft)
from ifdsim.integrator import IntegratorConfig, Trajectory, integrate
from ifdsim.prior import (BoxResponse, CorrelationKernel, PrecomputedOperators,
                          assemble_operators, solve_gram)
from ifdsim.reconstruct import ErrorReport, compare, project_to_data, \
    wiener_reconstruct
from ifdsim.schemes import (BurgersParams, DataVector, box_ifd_rhs, fd_rhs,
                            fourier_ifd_rhs, fourier_ifd_rhs_generic,
                            noise_lift)

__version__ = "0.1.0"

__all__ = [
    "BoxResponse", "BurgersParams", "CorrelationKernel", "DataVector",
    "ErrorReport", "FineField", "IntegratorConfig", "PeriodicDomain",
    "PrecomputedOperators", "SpectralField", "Trajectory",
    "assemble_operators", "box_ifd_rhs", "circular_convolve", "compare",
    "dft", "fd_rhs", "fourier_ifd_rhs", "fourier_ifd_rhs_generic", "idft",
    "integrate", "noise_lift", "project_to_data", "solve_gram",
    "wiener_reconstruct",
]
