"""Eigenvalue statistics of the correlated Jacobi and Cauchy-Lorentz ensembles.

Three independent routes to the same level densities, built for
cross-validation against each other:

* sampler        -- Monte Carlo draws of both ensembles,
* exact_complex  -- finite-size determinantal formulas (beta=2),
* exact_real     -- finite-size quadrature assembly (beta=1),
* asymptotic     -- large-matrix saddle-point densities (any beta).
"""

from .errors import AccuracyError, NumericalError, RejectedInputError, RmtJacobiError
from .model import (CorrelationSpectrum, DensityCurve, EnsembleParams,
                    EvaluationGrid, cl_to_jacobi_point, jacobi_to_cl_point,
                    transport_density_cl_to_jacobi, transport_density_jacobi_to_cl)
from .presets import FIG1, FIG2, FIG3, PRESETS
from .sampler import (SampleBatch, histogram, sample_cauchy_lorentz,
                      sample_cauchy_lorentz_direct, sample_correlated_gaussian,
                      sample_jacobi)

__all__ = [
    "AccuracyError", "NumericalError", "RejectedInputError", "RmtJacobiError",
    "CorrelationSpectrum", "DensityCurve", "EnsembleParams", "EvaluationGrid",
    "cl_to_jacobi_point", "jacobi_to_cl_point",
    "transport_density_cl_to_jacobi", "transport_density_jacobi_to_cl",
    "FIG1", "FIG2", "FIG3", "PRESETS",
    "SampleBatch", "histogram", "sample_cauchy_lorentz",
    "sample_cauchy_lorentz_direct", "sample_correlated_gaussian", "sample_jacobi",
]

__version__ = "0.1.0"
