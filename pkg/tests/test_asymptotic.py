import math

import numpy as np
import pytest

from rmt_jacobi.asymptotic import (SaddleSolution, asymptotic_cl_density,
                                   asymptotic_jacobi_density,
                                   jacobi_density_curve, saddle_polynomial,
                                   saddle_rational, saddle_roots, solve_saddle)
from rmt_jacobi.errors import RejectedInputError
from rmt_jacobi.exact_complex import KernelContext, jacobi_level_density_c
from rmt_jacobi.model import CorrelationSpectrum, EnsembleParams, EvaluationGrid
from rmt_jacobi.presets import FIG3


def test_polynomial_shape_and_p1_roots():
    params = EnsembleParams(1, 3, 4, 2)
    spectrum = CorrelationSpectrum((1.0,))
    coeffs = saddle_polynomial(0.7, spectrum, params)
    assert len(coeffs) == params.p + 2
    assert np.isrealobj(coeffs)
    roots = saddle_roots(0.7, spectrum, params)
    for q in roots:
        assert abs(saddle_rational(q, 0.7, spectrum, params)) < 1e-12


@pytest.mark.parametrize("p", [2, 5, 9])
def test_polynomial_degree_various_p(p):
    spectrum = CorrelationSpectrum(tuple(0.5 + k for k in range(p)))
    params = EnsembleParams(p, p + 3, p + 5, 2)
    assert len(saddle_polynomial(1.3, spectrum, params)) == p + 2


def test_root_set_complete_and_conjugate_closed():
    rng = np.random.default_rng(5)
    for b in rng.uniform(0.05, 50.0, 6):
        roots = saddle_roots(float(b), FIG3.spectrum, FIG3.params)
        assert len(roots) == FIG3.params.p + 1
        for q in roots:
            assert min(abs(np.conj(q) - roots)) < 1e-10 * (1 + abs(q))
            assert abs(saddle_rational(q, b, FIG3.spectrum, FIG3.params)) < 1e-10


def test_solve_saddle_unique_upper_root_and_residual():
    sol = solve_saddle(3.0, FIG3.spectrum, FIG3.params)
    assert sol.exists and sol.q0.imag > 0.0
    assert sol.residual < 1e-10


def test_outside_support_no_saddle():
    sol = solve_saddle(1e3 * max(FIG3.spectrum.lambdas), FIG3.spectrum, FIG3.params)
    assert not sol.exists
    assert asymptotic_cl_density(1e3 * max(FIG3.spectrum.lambdas),
                                 FIG3.spectrum, FIG3.params) == 0.0


def test_tiny_b_returns_zero_density():
    sol = solve_saddle(1e-14 * FIG3.spectrum.lambdas[0], FIG3.spectrum, FIG3.params)
    assert isinstance(sol, SaddleSolution) and not sol.exists


@pytest.mark.parametrize("factor", [2, 3])
def test_degeneracy_invariance(factor):
    lam = np.concatenate([FIG3.spectrum.values * (1.0 + k * 1e-12)
                          for k in range(factor)])
    spec_l = CorrelationSpectrum(tuple(lam), min_gap=1e-13)
    par_l = EnsembleParams(FIG3.params.p * factor, FIG3.params.n1 * factor,
                           FIG3.params.n2 * factor, FIG3.params.beta)
    for b in (0.5, 3.0, 40.0):
        q1 = solve_saddle(b, FIG3.spectrum, FIG3.params).q0
        q2 = solve_saddle(b, spec_l, par_l).q0
        assert abs(q1 - q2) < 1e-10
        d1 = asymptotic_cl_density(b, FIG3.spectrum, FIG3.params)
        d2 = asymptotic_cl_density(b, spec_l, par_l)
        assert abs(d1 - d2) < 1e-10


def test_dual_formula_agreement_on_grid():
    spectrum, params = FIG3.spectrum, FIG3.params
    p, n1, n2 = params.p, params.n1, params.n2
    lam = spectrum.values
    for x in np.linspace(-0.95, 0.85, 64):
        b = (1.0 - x) / (1.0 + x)
        sol = solve_saddle(b, spectrum, params)
        if not sol.exists:
            continue
        q = sol.q0
        compact = ((n1 + n2 - p) / (math.pi * p) / b
                   * q.imag / ((q.real + 1) ** 2 + q.imag ** 2))
        resolvent = float(np.sum(lam * q.imag / ((b - lam * q.real) ** 2
                                                 + (lam * q.imag) ** 2))) / (math.pi * p)
        assert abs(compact - resolvent) < 1e-8


def test_beta_independence():
    spectrum = FIG3.spectrum
    par1 = EnsembleParams(32, 71, 68, 1)
    par2 = EnsembleParams(32, 71, 68, 2)
    for x in (-0.9, -0.3, 0.2, 0.6):
        assert asymptotic_jacobi_density(x, spectrum, par1) == \
            asymptotic_jacobi_density(x, spectrum, par2)


def test_levy_tail_slope():
    p = 16
    spectrum = CorrelationSpectrum(tuple(1.0 + (j + 1) * 1e-6 for j in range(p)))
    params = EnsembleParams(p, p, 2 * p, 2)
    bs = np.geomspace(1e2, 1e4, 25)
    dens = np.array([asymptotic_cl_density(b, spectrum, params) for b in bs])
    slope = float(np.polyfit(np.log(bs), np.log(dens), 1)[0])
    assert abs(slope + 1.5) < 0.05


def test_transport_consistency():
    # printed Jacobi formula equals transported CL density
    for x in (-0.7, -0.1, 0.45):
        b = (1.0 - x) / (1.0 + x)
        lhs = asymptotic_jacobi_density(x, FIG3.spectrum, FIG3.params)
        rhs = 2.0 / (1 + x) ** 2 * asymptotic_cl_density(b, FIG3.spectrum,
                                                         FIG3.params)
        assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-15)


def test_mass_of_fig3_curve():
    curve = jacobi_density_curve(FIG3.spectrum, FIG3.params,
                                 EvaluationGrid.uniform_jacobi(128))
    assert curve.normalization_residual < 1e-3


def test_mirror_symmetry_asymptotic():
    mirror_spec = FIG3.spectrum.inverse()
    mirror_par = FIG3.params.swapped()
    for x in (-0.5, -0.1, 0.3):
        a = asymptotic_jacobi_density(x, FIG3.spectrum, FIG3.params)
        b = asymptotic_jacobi_density(-x, mirror_spec, mirror_par)
        assert abs(a - b) < 1e-8


def test_argument_validation():
    with pytest.raises(RejectedInputError):
        solve_saddle(-1.0, FIG3.spectrum, FIG3.params)
    with pytest.raises(RejectedInputError):
        asymptotic_jacobi_density(1.0, FIG3.spectrum, FIG3.params)


def test_exact_to_asymptotic_convergence_p16_to_p32():
    # fixed base spectrum; doubling (p, n1, n2) with a duplicated spectrum
    # must shrink the bulk sup-distance between exact and limiting densities
    rng = np.random.default_rng(17)
    lam16 = np.sort(np.abs(rng.normal(0.0, 1.0, 16))) + 0.05
    s16 = CorrelationSpectrum(tuple(lam16))
    p16 = EnsembleParams(16, 36, 34, 2)
    lam32 = np.sort(np.concatenate([lam16, lam16 * (1 + 1e-6)]))
    s32 = CorrelationSpectrum(tuple(lam32), min_gap=1e-7)
    p32 = EnsembleParams(32, 72, 68, 2)

    xs = np.linspace(-0.999, 0.999, 1001)
    dens = np.array([asymptotic_jacobi_density(x, s16, p16) for x in xs])
    support = xs[dens > 1e-9 * dens.max()]
    lo, hi = support.min(), support.max()
    width = hi - lo
    grid = np.linspace(lo + 0.1 * width, hi - 0.1 * width, 81)

    ctx16 = KernelContext(p16, s16, dps=60)
    ctx32 = KernelContext(p32, s32, dps=150)
    sup16 = max(abs(jacobi_level_density_c(x, ctx16)
                    - asymptotic_jacobi_density(x, s16, p16)) for x in grid)
    sup32 = max(abs(jacobi_level_density_c(x, ctx32)
                    - asymptotic_jacobi_density(x, s16, p16)) for x in grid)
    assert sup32 < sup16
