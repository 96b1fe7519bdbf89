import math

import numpy as np
import pytest

from rmt_jacobi.errors import AccuracyError, RejectedInputError
from rmt_jacobi.quadrature import Cell, integrate_pv32, integrate_sqrt


def test_cell_validation():
    with pytest.raises(RejectedInputError):
        Cell(1.0, 0.5)
    with pytest.raises(RejectedInputError):
        Cell(0.0, 1.0, "three_half", "three_half")
    with pytest.raises(RejectedInputError):
        Cell(0.0, math.inf, "none", "three_half")
    with pytest.raises(RejectedInputError):
        Cell(0.0, 1.0, "weird", "none")
    Cell(0.0, math.inf, "half", "none")


def test_inverse_sqrt():
    v = integrate_sqrt(lambda r: 1.0 / np.sqrt(r), Cell(0, 1, "half", "none"))
    assert abs(v - 2.0) < 1e-10


def test_arcsine():
    v = integrate_sqrt(lambda r: 1.0 / np.sqrt(r * (1 - r)), Cell(0, 1, "half", "half"))
    assert abs(v - math.pi) < 1e-9


def _tail_oracle():
    # brute force: substitute r = 1 + t^2 (so |1-r| = t^2 exactly), then a
    # dense trapezoid with a truncation sweep
    def one(T, n):
        t = np.linspace(0.0, math.sqrt(T), n)
        g = 2.0 * np.sqrt(1.0 + t * t) * (2.0 + t * t) ** -3.0
        return float(np.trapezoid(g, t))

    coarse, fine = one(1e4, 2_000_001), one(4e4, 4_000_001)
    assert abs(fine - coarse) < 1e-9     # truncation converged
    return fine


def test_semi_infinite_tail_vs_brute_force():
    f = lambda r: np.sqrt(r) * (1.0 + r) ** -3.0 / np.sqrt(np.abs(1.0 - r))
    v = integrate_sqrt(f, Cell(1.0, math.inf, "half", "none"))
    assert abs(v - _tail_oracle()) < 1e-8


def test_pv_constant_only_boundary_term():
    f = lambda r: np.full_like(np.asarray(r, dtype=float), 3.0)
    v = integrate_pv32(f, Cell(0, 1, "none", "three_half"))
    assert abs(v - (-6.0)) < 1e-10


def test_pv_linear_analytic():
    # int_0^1 (r-1)/|1-r|^{3/2} dr - 2 = -int |1-r|^{-1/2} - 2 = -4
    v = integrate_pv32(lambda r: np.asarray(r, dtype=float),
                       Cell(0, 1, "none", "three_half"))
    assert abs(v - (-4.0)) < 1e-10


def test_pv_lower_edge_constant():
    f = lambda r: np.full_like(np.asarray(r, dtype=float), 2.0)
    v = integrate_pv32(f, Cell(1, 2, "three_half", "none"))
    assert abs(v - (-4.0)) < 1e-10


def test_pv_infinite_cell_has_no_boundary_term():
    # f -> c at the edge, decaying tail: J = int (f - f(e))/|e-r|^{3/2}
    f = lambda r: 1.0 / (1.0 + np.asarray(r, dtype=float))
    v = integrate_pv32(f, Cell(1.0, math.inf, "three_half", "none"))
    # analytic: int_1^inf (1/(1+r) - 1/2)/(r-1)^{3/2} dr = -pi/(2 sqrt(2))
    assert abs(v - (-math.pi / (2.0 * math.sqrt(2.0)))) < 1e-8


def test_linearity():
    f1 = lambda r: 1.0 / np.sqrt(r)
    f2 = lambda r: np.cos(r) / np.sqrt(r)
    cell = Cell(0, 1, "half", "none")
    combined = integrate_sqrt(lambda r: 2 * f1(r) + 3 * f2(r), cell)
    separate = 2 * integrate_sqrt(f1, cell) + 3 * integrate_sqrt(f2, cell)
    assert abs(combined - separate) < 10 * 1e-10


def test_additivity_on_non_singular_split():
    g = lambda r: np.exp(-r) * np.sin(3 * r) ** 2
    whole = integrate_sqrt(g, Cell(0, 2))
    parts = integrate_sqrt(g, Cell(0, 0.7)) + integrate_sqrt(g, Cell(0.7, 2))
    assert abs(whole - parts) < 10 * 1e-10


def test_pv_with_vanishing_edge_value_reduces_to_sqrt_class():
    # f(e)=0: the pv result must equal the direct integral of f/|e-r|^{3/2},
    # which is then a genuine |.|^{-1/2}-class integrand
    f = lambda r: (1.0 - np.asarray(r, dtype=float)) * np.exp(np.asarray(r, float))
    pv = integrate_pv32(f, Cell(0, 1, "none", "three_half"))
    direct = integrate_sqrt(lambda r: f(r) / np.abs(1.0 - r) ** 1.5,
                            Cell(0, 1, "none", "half"))
    assert abs(pv - direct) < 10 * 1e-8


def test_divergent_tail_raises():
    with pytest.raises(AccuracyError):
        integrate_sqrt(lambda r: 1.0 / r, Cell(1.0, math.inf))


def test_interior_pole_exhausts_refinement():
    with pytest.raises(AccuracyError) as err:
        integrate_sqrt(lambda r: 1.0 / np.abs(r - 0.5), Cell(0, 1))
    assert err.value.error_bound is None or err.value.error_bound > 0


def test_sqrt_rejects_three_half_tag():
    with pytest.raises(RejectedInputError):
        integrate_sqrt(lambda r: r, Cell(0, 1, "none", "three_half"))
    with pytest.raises(RejectedInputError):
        integrate_pv32(lambda r: r, Cell(0, 1, "half", "half"))
