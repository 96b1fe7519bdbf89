"""Large-matrix level densities from the saddle-point equation.

For n1, n2, p large at fixed ratios, the level density is governed by the
stationarity condition

    L'(q) = (n1+n2-p)/p * 1/(q+1) - n2/p * 1/q - (1/p) sum_j L_j/(b - q L_j) = 0.

Clearing denominators turns this into a real polynomial of degree p+1 whose
roots away from the poles are exactly the solutions.  Of the p+1 roots, p-1
are real; the density is carried by the unique root in the open upper
half-plane when it exists, otherwise the density vanishes.  The limit is
independent of the Dyson index, so one curve serves both symmetry classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import NumericalError, RejectedInputError
from .model import (CAUCHY_LORENTZ, JACOBI, CorrelationSpectrum, DensityCurve,
                    EnsembleParams, EvaluationGrid)

# roots this far below the smallest pole scale count as the zero-density regime
_B_MIN_FACTOR = 1e-12


@dataclass(frozen=True)
class SaddleSolution:
    """Upper-half-plane saddle q0 at evaluation point b, or absence (density 0)."""

    b: float
    q0: complex | None
    residual: float

    @property
    def exists(self) -> bool:
        return self.q0 is not None


def _check_args(b: float, spectrum: CorrelationSpectrum, params: EnsembleParams):
    if b <= 0.0:
        raise RejectedInputError(f"b must be positive, got {b}")
    if len(spectrum) != params.p:
        raise RejectedInputError(
            f"spectrum has {len(spectrum)} eigenvalues, expected p={params.p}")


def saddle_polynomial(b: float, spectrum: CorrelationSpectrum,
                      params: EnsembleParams) -> np.ndarray:
    """Coefficients (ascending powers, length p+2) of the cleared saddle equation.

    P(q) = (n1+n2-p) q prod_j(b - q L_j) - n2 (q+1) prod_j(b - q L_j)
           - q (q+1) sum_j L_j prod_{k!=j}(b - q L_k)
    """
    _check_args(b, spectrum, params)
    lam = spectrum.values
    p, n1, n2 = params.p, params.n1, params.n2
    full = np.array([1.0])
    for lj in lam:
        full = np.convolve(full, np.array([b, -lj]))
    deriv_sum = np.zeros(p)            # sum_j L_j prod_{k!=j}(b - q L_k), degree p-1
    for j in range(p):
        part = np.array([1.0])
        for k in range(p):
            if k != j:
                part = np.convolve(part, np.array([b, -lam[k]]))
        deriv_sum += lam[j] * part
    q = np.array([0.0, 1.0])
    q_plus_1 = np.array([1.0, 1.0])
    poly = ((n1 + n2 - p) * np.convolve(q, full)
            - n2 * np.convolve(q_plus_1, full)
            - np.convolve(np.convolve(q, q_plus_1), deriv_sum))
    return poly


def saddle_rational(q: complex, b: float, spectrum: CorrelationSpectrum,
                    params: EnsembleParams) -> complex:
    """L'(q) in its original rational form (the residual reference)."""
    lam = spectrum.values
    p, n1, n2 = params.p, params.n1, params.n2
    return ((n1 + n2 - p) / (q + 1.0) - n2 / q
            - np.sum(lam / (b - q * lam))) / p


def _rational_derivative(q: complex, b: float, spectrum: CorrelationSpectrum,
                         params: EnsembleParams) -> complex:
    lam = spectrum.values
    p, n1, n2 = params.p, params.n1, params.n2
    return (-(n1 + n2 - p) / (q + 1.0) ** 2 + n2 / q ** 2
            - np.sum(lam ** 2 / (b - q * lam) ** 2)) / p


def _rational_scale(q: complex, b: float, spectrum: CorrelationSpectrum,
                    params: EnsembleParams) -> float:
    """Sum of |term| magnitudes of L'(q); the attainable residual floor."""
    lam = spectrum.values
    p, n1, n2 = params.p, params.n1, params.n2
    return float((n1 + n2 - p) / abs(q + 1.0) + n2 / abs(q)
                 + np.sum(lam / np.abs(b - q * lam))) / p


def _polish(q: complex, b: float, spectrum: CorrelationSpectrum,
            params: EnsembleParams) -> complex:
    for _ in range(80):
        r = saddle_rational(q, b, spectrum, params)
        if abs(r) <= 1e-14 * _rational_scale(q, b, spectrum, params):
            break
        d = _rational_derivative(q, b, spectrum, params)
        if d == 0.0:
            break
        q = q - r / d
    return q


def saddle_roots(b: float, spectrum: CorrelationSpectrum,
                 params: EnsembleParams) -> np.ndarray:
    """All p+1 roots of the cleared saddle equation.

    Expanding the polynomial and feeding a companion matrix loses the root
    structure already around p ~ 30 (clustered roots, coefficients spanning
    tens of orders of magnitude), so the roots are located structurally
    instead: p-1 real roots are bracketed between consecutive poles b/L_j of
    the rational form and found by bisection, and the remaining two follow
    exactly from the analytically known sum and product of all roots.  Every
    root is then polished against the rational form.
    """
    _check_args(b, spectrum, params)
    lam = spectrum.values
    p, n1, n2 = params.p, params.n1, params.n2

    def f(q):
        return ((n1 + n2 - p) / (q + 1.0) - n2 / q
                - float(np.sum(lam / (b - q * lam)))) / p

    poles = np.sort(b / lam)
    eps = np.finfo(float).eps
    gap_roots = []
    for k in range(p - 1):
        lo, hi = poles[k], poles[k + 1]
        gap = hi - lo
        # L' -> +inf at lo+ and -inf at hi-; widen the offset until rounding
        # noise cannot flip the bracket signs
        d = max(1e-9 * gap, 8.0 * eps * hi)
        a_end, b_end = lo + d, hi - d
        tries = 0
        while (f(a_end) <= 0.0 or f(b_end) >= 0.0) and tries < 50:
            d *= 4.0
            a_end, b_end = lo + d, hi - d
            tries += 1
            if a_end >= b_end:
                break
        if a_end >= b_end or f(a_end) <= 0.0 or f(b_end) >= 0.0:
            raise NumericalError(
                f"could not bracket the root between poles {lo} and {hi} at b={b}")
        gap_roots.append(scipy.optimize.brentq(f, a_end, b_end,
                                               xtol=1e-300, rtol=4.0 * eps))

    # Vieta: sum of all p+1 roots and log of their (positive) product
    e_all = [1.0] + [0.0] * p
    for idx, v in enumerate(lam):
        for m in range(idx + 1, 0, -1):
            e_all[m] += v * e_all[m - 1]
    total_sum = (b * e_all[p - 1] * (n1 - 1) + (n2 - p) * e_all[p]) / (n1 * e_all[p])
    log_total_prod = (math.log(n2 / n1) + p * math.log(b)
                      - float(np.sum(np.log(lam))))
    rem_sum = total_sum - math.fsum(gap_roots)
    log_rem_prod = log_total_prod - math.fsum(math.log(r) for r in gap_roots)
    rem_prod = math.exp(log_rem_prod)
    disc = rem_sum * rem_sum - 4.0 * rem_prod
    if disc < 0.0:
        guess = complex(0.5 * rem_sum, 0.5 * math.sqrt(-disc))
        q = _polish(guess, b, spectrum, params)
        pair = [q, q.conjugate()]
    else:
        root = math.sqrt(disc)
        pair = [complex(_polish(0.5 * (rem_sum + s * root), b, spectrum, params))
                for s in (+1.0, -1.0)]
    return np.array([complex(r) for r in gap_roots] + pair)


def solve_saddle(b: float, spectrum: CorrelationSpectrum,
                 params: EnsembleParams) -> SaddleSolution:
    """Select the unique upper-half-plane saddle, if any."""
    _check_args(b, spectrum, params)
    if b < _B_MIN_FACTOR * spectrum.lambdas[0]:
        return SaddleSolution(b, None, 0.0)
    roots = saddle_roots(b, spectrum, params)
    # im_tol is relative to the root magnitude so large roots stay meaningful;
    # the scale-relative residual bound rejects would-be roots at infinity
    # where every term of L' is individually tiny
    upper = []
    for q in roots:
        if q.imag <= 1e-8 * (1.0 + abs(q.real)):
            continue
        res = abs(saddle_rational(q, b, spectrum, params))
        if res < 1e-10 and res <= 1e-8 * _rational_scale(q, b, spectrum, params):
            upper.append((complex(q), res))
    if not upper:
        return SaddleSolution(b, None, 0.0)
    if len(upper) > 1:
        qs = [q for q, _ in upper]
        if max(abs(q - qs[0]) for q in qs) > 1e-8 * (1.0 + abs(qs[0])):
            raise NumericalError(
                f"multiple distinct upper-half-plane saddles at b={b}: {qs}")
    q0, res = upper[0]
    return SaddleSolution(b, q0, res)


def asymptotic_cl_density(b: float, spectrum: CorrelationSpectrum,
                          params: EnsembleParams) -> float:
    """Limiting Cauchy-Lorentz level density at b.

    Evaluates the compact saddle form and cross-checks it against the
    equivalent resolvent-sum form; the two agree identically at an exact
    saddle, so a mismatch flags a bad root.
    """
    sol = solve_saddle(b, spectrum, params)
    if not sol.exists:
        return 0.0
    q = sol.q0
    p, n1, n2 = params.p, params.n1, params.n2
    lam = spectrum.values
    compact = ((n1 + n2 - p) / (math.pi * p) / b
               * q.imag / ((q.real + 1.0) ** 2 + q.imag ** 2))
    resolvent = float(np.sum(lam * q.imag / ((b - lam * q.real) ** 2
                                             + (lam * q.imag) ** 2))) / (math.pi * p)
    if abs(compact - resolvent) > 1e-8 * max(1.0, abs(compact)):
        raise NumericalError(
            f"saddle density forms disagree at b={b}: {compact} vs {resolvent}")
    return max(compact, 0.0)


def asymptotic_jacobi_density(x: float, spectrum: CorrelationSpectrum,
                              params: EnsembleParams) -> float:
    """Limiting Jacobi level density at x in (-1, 1)."""
    x = float(x)
    if not (-1.0 < x < 1.0):
        raise RejectedInputError(f"x must lie in (-1, 1), got {x}")
    b = (1.0 - x) / (1.0 + x)
    sol = solve_saddle(b, spectrum, params)
    if not sol.exists:
        return 0.0
    q = sol.q0
    p, n1, n2 = params.p, params.n1, params.n2
    val = (2.0 * (n1 + n2 - p) / (math.pi * p) / (1.0 - x * x)
           * q.imag / ((q.real + 1.0) ** 2 + q.imag ** 2))
    return max(val, 0.0)


def jacobi_density_curve(spectrum: CorrelationSpectrum, params: EnsembleParams,
                         grid: EvaluationGrid | None = None,
                         mass_points: int = 4096) -> DensityCurve:
    if grid is None:
        grid = EvaluationGrid.uniform_jacobi()
    if grid.domain_tag != JACOBI:
        raise RejectedInputError("expected a jacobi grid")
    vals = [asymptotic_jacobi_density(x, spectrum, params) for x in grid.points]
    # sqrt edges inside (-1,1): a fine trapezoid mesh is accurate enough for
    # the recorded mass residual
    mesh = np.linspace(-1.0 + 1e-6, 1.0 - 1e-6, mass_points)
    dens = np.array([asymptotic_jacobi_density(x, spectrum, params) for x in mesh])
    residual = abs(float(np.trapezoid(dens, mesh)) - 1.0)
    return DensityCurve(grid, tuple(vals), "asymptotic", residual)


def cl_density_curve(spectrum: CorrelationSpectrum, params: EnsembleParams,
                     grid: EvaluationGrid) -> DensityCurve:
    if grid.domain_tag != CAUCHY_LORENTZ:
        raise RejectedInputError("expected a cauchy_lorentz grid")
    vals = [asymptotic_cl_density(b, spectrum, params) for b in grid.points]
    # measure the mass on the Jacobi side where the support is compact
    mesh = np.linspace(-1.0 + 1e-6, 1.0 - 1e-6, 4096)
    dens = np.array([asymptotic_jacobi_density(x, spectrum, params) for x in mesh])
    residual = abs(float(np.trapezoid(dens, mesh)) - 1.0)
    return DensityCurve(grid, tuple(vals), "asymptotic", residual)
