import math

import numpy as np
import pytest
from scipy.special import betaln

from rmt_jacobi.errors import RejectedInputError
from rmt_jacobi.exact_real import (RealDensityContext, c_integral,
                                   cl_density_curve_r, cl_level_density_r, g0,
                                   g1, jacobi_density_curve_r,
                                   jacobi_level_density_r)
from rmt_jacobi.exact_real import _raw_assembled
from rmt_jacobi.model import (CorrelationSpectrum, EnsembleParams,
                              EvaluationGrid)
from rmt_jacobi.presets import FIG2
from rmt_jacobi.verify import c_fourier_oracle, derz_oracle, g1_adjacent_oracle


@pytest.fixture()
def fig2_ctx():
    return RealDensityContext(FIG2.params, FIG2.spectrum)


# ---------------------------------------------------------------------------
# C integrals
# ---------------------------------------------------------------------------

def test_c_integral_empty_sum():
    assert c_integral(3, 2, 0, 1.5, []) == 0.0


def test_c_integral_single_energy_is_inverse():
    for bexp in (0, 3, 7):
        for kappa in (0.3, 1.7):
            assert math.isclose(c_integral(0, bexp, 1, kappa, [2.5]), 1 / 2.5,
                                rel_tol=1e-14)


def test_c_integral_232_example():
    # phi-integral is 1 - 4.5 k + 1.5 k^2, derivative at k=1 is -1.5
    val = c_integral(2, 3, 2, 1.0, [1.0, 2.0])
    assert math.isclose(val, -1.5, rel_tol=1e-12)
    orc = c_fourier_oracle(2, 3, 2, 1.0, [1.0, 2.0])
    assert abs(val - orc) < 1e-8


def test_c_integral_random_tuples_vs_fourier_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = int(rng.integers(0, 8))
        bexp = int(rng.integers(0, 9))
        c = int(rng.integers(1, 5))
        kappa = float(rng.uniform(0.2, 2.5))
        energies = list(rng.uniform(0.3, 5.0, c))
        mine = c_integral(a, bexp, c, kappa, energies)
        orc = c_fourier_oracle(a, bexp, c, kappa, energies)
        assert abs(mine - orc) <= 1e-8 * max(1.0, abs(orc))


def test_c_integral_rejections():
    with pytest.raises(RejectedInputError):
        c_integral(-1, 2, 1, 1.0, [1.0])
    with pytest.raises(RejectedInputError):
        c_integral(1, 2, 2, 1.0, [1.0])


# ---------------------------------------------------------------------------
# g integrals
# ---------------------------------------------------------------------------

def test_cells_partition(fig2_ctx):
    cells = fig2_ctx.cells(1.0)
    assert cells[0][0] == 0.0 and math.isinf(cells[-1][1])
    for (_, hi), (lo, _) in zip(cells[:-1], cells[1:]):
        assert hi == lo
    assert cells[0][1] == 0.25 and cells[1][1] == 1.0


def test_g0_p1_brute_force():
    params = EnsembleParams(1, 4, 4, 1)
    ctx = RealDensityContext(params, CorrelationSpectrum((1.0,)))
    val = g0(1, 4, 0, 1.0, ctx)
    # brute force: r = 1 - t^2 removes the upper singularity
    t = np.linspace(1e-9, 1.0, 4_000_001)
    r = 1.0 - t * t
    integrand = 2.0 * t * np.sqrt(r) * (1.0 + r) ** -2.0 / np.sqrt(np.abs(1.0 - r))
    assert abs(val - float(np.trapezoid(integrand, t))) < 1e-8


def test_g0_monotone_in_weight_exponent(fig2_ctx):
    for l in (0, 1, 2):
        assert g0(4, 10, l, 1.0, fig2_ctx) < g0(4, 8, l, 1.0, fig2_ctx)


def test_g0_index_validation(fig2_ctx):
    with pytest.raises(RejectedInputError):
        g0(4, 8, 3, 1.0, fig2_ctx)


def test_g1_far_cell_sign(fig2_ctx):
    # p=2: for i=2 the far cell is l=2 (sign of p-l-i = -2 -> negative);
    # for i=1 the far cell is l=0 (sign +1): signs enter only as the factor
    n2, mu = FIG2.params.n2, FIG2.params.mu
    far_neg = g1(n2 - 1, mu, 2, 2, 1.0, fig2_ctx)
    far_pos = g1(n2 - 1, mu, 0, 1, 1.0, fig2_ctx)
    assert far_neg < 0.0 < far_pos


def test_g1_adjacent_vs_eps_oracle(fig2_ctx):
    p, n2, mu = FIG2.params.p, FIG2.params.n2, FIG2.params.mu
    rng = np.random.default_rng(11)
    for _ in range(10):
        a = int(rng.choice([n2 - 1, n2 + 1]))
        i = int(rng.integers(1, p + 1))
        l = int(rng.choice([p - i, p - i + 1]))
        b = float(rng.uniform(0.4, 2.5))
        mine = g1(a, mu, l, i, b, fig2_ctx)
        orc = g1_adjacent_oracle(a, mu, l, i, b, FIG2.spectrum, p)
        expected = orc if l == p - i else -orc
        assert abs(mine - expected) <= 1e-4 * max(1e-12, abs(expected))


def test_g_cache_reuse(fig2_ctx):
    v1 = g0(4, 8, 1, 0.9, fig2_ctx)
    v2 = g0(4, 8, 1, 0.9, fig2_ctx)
    assert v1 == v2 and ("g0", 0.9, 4, 8, 1) in fig2_ctx._g_cache


# ---------------------------------------------------------------------------
# assembled density
# ---------------------------------------------------------------------------

def test_p1_density_matches_closed_form():
    n1, n2, lam = 5, 5, 2.0
    params = EnsembleParams(1, n1, n2, 1)
    ctx = RealDensityContext(params, CorrelationSpectrum((lam,)))

    def closed(b):
        return math.exp(0.5 * n1 * math.log(lam) + (0.5 * n2 - 1) * math.log(b)
                        - 0.5 * (n1 + n2) * math.log(b + lam)
                        - betaln(0.5 * n2, 0.5 * n1))

    for b in (0.4, 1.0, 2.3, 5.0):
        assert math.isclose(cl_level_density_r(b, ctx), closed(b), rel_tol=1e-9)


def test_sign_calibration_logged(fig2_ctx):
    cl_level_density_r(1.0, fig2_ctx)
    # the printed sign exponent makes the raw sum negative; calibration flips it
    assert fig2_ctx.calibration_sign == -1.0
    assert _raw_assembled(1.0, fig2_ctx) < 0.0


def test_p2_density_vs_derz_oracle(fig2_ctx):
    for b in (0.4, 0.7, 1.3, 2.0, 3.5):
        mine = cl_level_density_r(b, fig2_ctx)
        orc = derz_oracle(b, FIG2.spectrum, FIG2.params)
        assert abs(mine - orc) <= 1e-3 * abs(orc)


def test_antisymmetry_determinants_vanish_for_equal_cells(fig2_ctx):
    # both g1 rows on the same cell with the same index: 2x2 determinant is 0
    n2, mu = FIG2.params.n2, FIG2.params.mu
    row = [g1(n2 + 1, mu, 0, 1, 1.0, fig2_ctx), g1(n2 - 1, mu, 0, 1, 1.0, fig2_ctx)]
    det = row[0] * row[1] - row[1] * row[0]
    assert det == 0.0


def test_jacobi_curve_unit_mass_and_metadata(fig2_ctx):
    grid = EvaluationGrid.uniform_jacobi(161)
    curve = jacobi_density_curve_r(fig2_ctx, grid)
    assert abs(curve.mass() - 1.0) < 1e-6          # renormalized
    assert abs(curve.metadata["mass_pre_normalization"] - 1.0) < 1e-3
    assert curve.metadata["sign_flipped"] is True
    assert curve.normalization_residual < 1e-3
    assert fig2_ctx.max_clamp <= 1e-3 * max(curve.values)


def test_cl_curve_r(fig2_ctx):
    grid = EvaluationGrid(tuple(np.linspace(0.05, 12.0, 25)), "cauchy_lorentz")
    curve = cl_density_curve_r(fig2_ctx, grid)
    assert curve.method == "exact_real"
    assert all(v >= 0.0 for v in curve.values)


def test_mirror_symmetry_real():
    ctx = RealDensityContext(FIG2.params, FIG2.spectrum)
    mirror = RealDensityContext(FIG2.params.swapped(), FIG2.spectrum.inverse())
    for x in (-0.4, 0.2):
        a = jacobi_level_density_r(x, ctx)
        b = jacobi_level_density_r(-x, mirror)
        assert abs(a - b) <= 1e-3 * abs(a)


def test_real_context_rejects_beta2():
    with pytest.raises(RejectedInputError):
        RealDensityContext(EnsembleParams(2, 5, 5, 2), FIG2.spectrum)
