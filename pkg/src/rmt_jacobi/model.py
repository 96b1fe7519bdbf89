"""Domain types and coordinate maps shared by every other module.

Two coordinate systems are used throughout: the Jacobi ensemble lives on the
open interval (-1, 1), the Cauchy-Lorentz ensemble on the open half-line
(0, inf).  The bijection b = (1 - x)/(1 + x) connects them and is its own
inverse; densities transport with the Jacobian factor 2/(1 + x)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RejectedInputError

JACOBI = "jacobi"
CAUCHY_LORENTZ = "cauchy_lorentz"

DENSITY_METHODS = ("monte_carlo", "exact_complex", "exact_real", "asymptotic")


@dataclass(frozen=True)
class EnsembleParams:
    """Matrix dimensions (p, n1, n2) and Dyson index beta (1 real, 2 complex)."""

    p: int
    n1: int
    n2: int
    beta: int

    def __post_init__(self):
        for name in ("p", "n1", "n2"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise RejectedInputError(f"{name} must be a positive integer, got {v!r}")
        if self.beta not in (1, 2):
            raise RejectedInputError(f"beta must be 1 or 2, got {self.beta!r}")
        if self.n1 < self.p or self.n2 < self.p:
            raise RejectedInputError(
                f"need n1 >= p and n2 >= p, got p={self.p}, n1={self.n1}, n2={self.n2}")

    @property
    def gamma(self) -> int:
        return 2 if self.beta == 1 else 1

    @property
    def mu(self) -> int:
        return self.n1 + self.n2 - self.p

    def swapped(self) -> "EnsembleParams":
        """Counterpart under the n1 <-> n2 mirror symmetry."""
        return EnsembleParams(self.p, self.n2, self.n1, self.beta)


@dataclass(frozen=True)
class CorrelationSpectrum:
    """Strictly increasing positive eigenvalues of the effective correlation matrix.

    Degenerate (or nearly degenerate) spectra are rejected at construction:
    every exact formula downstream divides by eigenvalue differences.  Users
    can approximate degeneracy with values separated by at least ``min_gap``
    in relative terms.
    """

    lambdas: tuple[float, ...]
    min_gap: float = 1e-8

    def __post_init__(self):
        vals = tuple(sorted(float(v) for v in self.lambdas))
        object.__setattr__(self, "lambdas", vals)
        if len(vals) == 0:
            raise RejectedInputError("spectrum must contain at least one eigenvalue")
        if any(not math.isfinite(v) or v <= 0.0 for v in vals):
            raise RejectedInputError(f"eigenvalues must be finite and positive, got {vals}")
        for a, b in zip(vals, vals[1:]):
            if (b - a) / a < self.min_gap:
                raise RejectedInputError(
                    f"degenerate spectrum: relative gap between {a} and {b} "
                    f"is below min_gap={self.min_gap}")

    def __len__(self) -> int:
        return len(self.lambdas)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.lambdas, dtype=float)

    def inverse(self) -> "CorrelationSpectrum":
        """Spectrum of the inverse matrix, re-sorted ascending."""
        return CorrelationSpectrum(tuple(1.0 / v for v in reversed(self.lambdas)),
                                   min_gap=self.min_gap)


@dataclass(frozen=True)
class EvaluationGrid:
    """Strictly increasing points inside the tagged open domain."""

    points: tuple[float, ...]
    domain_tag: str

    def __post_init__(self):
        pts = tuple(float(v) for v in self.points)
        object.__setattr__(self, "points", pts)
        if self.domain_tag not in (JACOBI, CAUCHY_LORENTZ):
            raise RejectedInputError(f"unknown domain tag {self.domain_tag!r}")
        if len(pts) == 0:
            raise RejectedInputError("grid must contain at least one point")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise RejectedInputError("grid points must be strictly increasing")
        if self.domain_tag == JACOBI:
            if pts[0] <= -1.0 or pts[-1] >= 1.0:
                raise RejectedInputError("jacobi grid points must lie strictly inside (-1, 1)")
        else:
            if pts[0] <= 0.0:
                raise RejectedInputError("cauchy_lorentz grid points must be strictly positive")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    @classmethod
    def uniform_jacobi(cls, num: int = 512, margin: float = 1e-3) -> "EvaluationGrid":
        # densities may be singular at +-1, so stay a margin away from the endpoints
        pts = np.linspace(-1.0 + margin, 1.0 - margin, num)
        return cls(tuple(pts), JACOBI)

    @classmethod
    def uniform_cl(cls, lower: float, upper: float, num: int = 512) -> "EvaluationGrid":
        if not (0.0 < lower < upper):
            raise RejectedInputError("need 0 < lower < upper for a cauchy_lorentz grid")
        return cls(tuple(np.linspace(lower, upper, num)), CAUCHY_LORENTZ)

    def mapped(self) -> "EvaluationGrid":
        """Image of this grid under the involution b = (1-x)/(1+x), re-sorted."""
        other = JACOBI if self.domain_tag == CAUCHY_LORENTZ else CAUCHY_LORENTZ
        return EvaluationGrid(tuple((1.0 - self.array[::-1]) / (1.0 + self.array[::-1])),
                              other)


@dataclass(frozen=True, eq=False)
class DensityCurve:
    """A sampled density with method provenance and its normalization residual.

    ``normalization_residual`` is |mass - 1| of the curve *before* any
    renormalization applied by the producer; it is recorded, never silently
    discarded.  ``metadata`` carries producer-specific calibration logs.
    """

    grid: EvaluationGrid
    values: tuple[float, ...]
    method: str
    normalization_residual: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.method not in DENSITY_METHODS:
            raise RejectedInputError(f"unknown method tag {self.method!r}")
        if len(vals) != len(self.grid.points):
            raise RejectedInputError("values and grid have different lengths")
        if any(not math.isfinite(v) or v < 0.0 for v in vals):
            raise RejectedInputError("density values must be finite and nonnegative")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def mass(self) -> float:
        """Trapezoid mass over the sampled grid."""
        return float(np.trapezoid(self.array, self.grid.array))


# ---------------------------------------------------------------------------
# coordinate maps
# ---------------------------------------------------------------------------

def jacobi_to_cl_point(x: float) -> float:
    """Map x in (-1, 1) to b = (1-x)/(1+x) in (0, inf)."""
    x = float(x)
    if not (-1.0 < x < 1.0):
        raise RejectedInputError(f"x must lie in (-1, 1), got {x}")
    return (1.0 - x) / (1.0 + x)


def cl_to_jacobi_point(b: float) -> float:
    """Inverse map: b in (0, inf) to x = (1-b)/(1+b) in (-1, 1)."""
    b = float(b)
    if not (b > 0.0) or math.isinf(b):
        raise RejectedInputError(f"b must lie in (0, inf), got {b}")
    return (1.0 - b) / (1.0 + b)


def transport_density_cl_to_jacobi(curve: DensityCurve) -> DensityCurve:
    """Pull a Cauchy-Lorentz density back to the Jacobi interval.

    S(x) = [2/(1+x)^2] * S'((1-x)/(1+x)); total mass is preserved.
    """
    if curve.grid.domain_tag != CAUCHY_LORENTZ:
        raise RejectedInputError("expected a curve on the cauchy_lorentz domain")
    b = curve.grid.array
    x = (1.0 - b) / (1.0 + b)           # decreasing in b
    jac = 2.0 / (1.0 + x) ** 2
    values = (jac * curve.array)[::-1]
    grid = EvaluationGrid(tuple(x[::-1]), JACOBI)
    return DensityCurve(grid, tuple(values), curve.method,
                        curve.normalization_residual, dict(curve.metadata))


def transport_density_jacobi_to_cl(curve: DensityCurve) -> DensityCurve:
    """Push a Jacobi density forward to the half-line: S'(b) = [2/(1+b)^2] S(x(b))."""
    if curve.grid.domain_tag != JACOBI:
        raise RejectedInputError("expected a curve on the jacobi domain")
    x = curve.grid.array
    b = (1.0 - x) / (1.0 + x)
    jac = 2.0 / (1.0 + b) ** 2
    values = (jac * curve.array)[::-1]
    grid = EvaluationGrid(tuple(b[::-1]), CAUCHY_LORENTZ)
    return DensityCurve(grid, tuple(values), curve.method,
                        curve.normalization_residual, dict(curve.metadata))
