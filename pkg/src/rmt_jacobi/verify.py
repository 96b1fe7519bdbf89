"""Cross-validation suites: invariants, independent oracles, and statistics.

Every check returns a dict entry (name, passed, value, target, detail); the
fast suite runs everything deterministic, the full suite adds the Monte Carlo
reproductions.  The oracles here are deliberately independent of the
implementation paths they referee:

* c_fourier_oracle      -- trapezoid Fourier integral + central difference,
* g1_adjacent_oracle    -- sinh-resolved epsilon-regularized integral,
                           Richardson-extrapolated in sqrt(epsilon),
* derz_oracle           -- the two-fold integral behind the real density,
                           evaluated on graded meshes at finite epsilon,
* haar_group_average    -- Monte Carlo average over Haar-random unitaries.
"""

from __future__ import annotations

import math
import time

import numpy as np
import scipy.integrate
import scipy.stats

from . import asymptotic, exact_complex, exact_real, sampler
from .model import (CorrelationSpectrum, EnsembleParams, EvaluationGrid,
                    jacobi_to_cl_point, cl_to_jacobi_point,
                    transport_density_cl_to_jacobi, transport_density_jacobi_to_cl)
from .presets import FIG1, FIG2, FIG3
from .quadrature import Cell, integrate_pv32, integrate_sqrt

EPS_LADDER = (1e-3, 1e-4, 1e-5)


def _entry(name: str, passed: bool, value, target: str, detail: str = "") -> dict:
    return {"name": name, "passed": bool(passed), "value": value,
            "target": target, "detail": detail}


# ---------------------------------------------------------------------------
# statistics shared with the CLI compare command
# ---------------------------------------------------------------------------

def bin_probabilities(edges: np.ndarray, density_fn) -> np.ndarray:
    """Per-bin mass of a density via 6-point Gauss-Legendre."""
    nodes, weights = np.polynomial.legendre.leggauss(6)
    probs = np.empty(len(edges) - 1)
    for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        h = 0.5 * (b - a)
        xs = a + h * (nodes + 1.0)
        probs[k] = h * float(np.dot(weights, [density_fn(x) for x in xs]))
    return probs


def binned_l1_stats(pooled: np.ndarray, bins: int, density_fn) -> dict:
    """Binned L1 distance with its 3-sigma multinomial bound, chi^2 and KS."""
    counts, edges = np.histogram(pooled, bins=bins)
    n = counts.sum()
    probs = bin_probabilities(edges, density_fn)
    frac = counts / n
    l1 = float(np.abs(frac - probs).sum())
    var = probs * (1.0 - probs) / n
    bound = float(np.sqrt(2.0 * var / math.pi).sum()
                  + 3.0 * math.sqrt(((1.0 - 2.0 / math.pi) * var).sum()))
    # chi^2 conditioned on the binned range, folding sparse edge bins inward
    scaled = probs / probs.sum() * n
    lo = 0
    while lo < len(scaled) - 1 and scaled[:lo + 1].sum() < 5.0:
        lo += 1
    hi = len(scaled)
    while hi > lo + 2 and scaled[hi - 1:].sum() < 5.0:
        hi -= 1
    obs = np.concatenate([[counts[:lo + 1].sum()], counts[lo + 1:hi - 1],
                          [counts[hi - 1:].sum()]])
    exp = np.concatenate([[scaled[:lo + 1].sum()], scaled[lo + 1:hi - 1],
                          [scaled[hi - 1:].sum()]])
    keep = exp > 0
    chi2 = float((((obs - exp) ** 2)[keep] / exp[keep]).sum())
    dof = int(keep.sum()) - 1
    pvalue = float(scipy.stats.chi2.sf(chi2, dof))
    # KS distance against the analytic CDF on the sampled range
    grid = np.linspace(edges[0], edges[-1], 2049)
    dens = np.array([density_fn(x) for x in grid])
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1])
                                           * np.diff(grid))])
    cdf_at = np.interp(np.sort(pooled), grid, cdf)
    ks = float(np.max(np.abs(cdf_at - (np.arange(1, n + 1)) / n)))
    return {"l1": l1, "l1_bound_3sigma": bound, "chi2": chi2, "chi2_dof": dof,
            "chi2_pvalue": pvalue, "ks_distance": ks, "num_pooled": int(n)}


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def c_fourier_oracle(a: int, bexp: int, c: int, kappa: float, energies,
                     n: int = 2 ** 14, h: float = 1e-6) -> float:
    """Trapezoid Fourier integral, differentiated by central difference."""
    phi = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    z = np.exp(1j * phi)
    base = np.exp(-1j * a * phi) * (1.0 + z) ** bexp

    def value(k):
        prod = np.ones_like(z)
        for e in energies:
            prod = prod * (k / e - z)
        return float(np.mean(base * prod).real)

    return (value(kappa + h) - value(kappa - h)) / (2.0 * h)


def _sqrt_eps_fit(values, eps_ladder=EPS_LADDER) -> float:
    """Extract the constant term of A eps^{-1/2} + J + B eps^{1/2}."""
    mat = np.array([[e ** -0.5, 1.0, e ** 0.5] for e in eps_ladder])
    return float(np.linalg.solve(mat, np.asarray(values, dtype=float))[1])


def g1_adjacent_oracle(a: int, c: int, l: int, i: int, b: float,
                       spectrum: CorrelationSpectrum, p: int,
                       eps_ladder=EPS_LADDER) -> float:
    """Regularized value of the adjacent-cell 3/2-singular integral.

    Integrates f(r) / ((b + i eps)/L_i - r)^{3/2} over the cell at finite
    eps with the ridge resolved by r = edge +/- (eps/L_i) sinh t, takes the
    real part below the edge and the imaginary part above it, and removes
    the eps^{-1/2} divergence by the three-point fit.  Returns the J-value;
    the production path books the upper-side cell with an extra minus sign.
    """
    lam = spectrum.values
    edge = b / lam[i - 1]
    edges = sorted(b / v for v in lam)
    bounds = [0.0] + edges + [math.inf]
    lo, hi = bounds[l], bounds[l + 1]
    keep = np.delete(lam, i - 1)

    def f(r):
        det = np.abs(np.prod(b / keep[:, None] - np.atleast_1d(r)[None, :], axis=0))
        return (np.atleast_1d(r) ** (a / 2.0)
                * (1.0 + np.atleast_1d(r)) ** (-c / 2.0) / np.sqrt(det))

    above = (l == p - i + 1)
    values = []
    for eps in eps_ladder:
        epp = eps / lam[i - 1]
        if above:
            span = (hi - edge) if math.isfinite(hi) else 1e3 * max(1.0, b, edge)

            def gt(t):
                u = epp * math.sinh(t)
                val = (f(edge + u)[0] * math.cosh(t)
                       * (1j - math.sinh(t)) ** -1.5)
                return epp ** -0.5 * val.imag
        else:
            span = edge - lo

            def gt(t):
                u = epp * math.sinh(t)
                val = (f(edge - u)[0] * math.cosh(t)
                       * (math.sinh(t) + 1j) ** -1.5)
                return epp ** -0.5 * val.real

        t_max = math.asinh(span / epp)
        val, _ = scipy.integrate.quad(gt, 0.0, t_max, limit=800,
                                      epsabs=1e-12, epsrel=1e-10)
        values.append(val)
    return _sqrt_eps_fit(values, eps_ladder)


def _c_complex(a, bexp, c, kappa, energies):
    if c == 0:
        return 0.0
    inv = [1.0 / float(v) for v in energies]
    es = [1.0] + [0.0] * c
    for idx, v in enumerate(inv):
        for m in range(idx + 1, 0, -1):
            es[m] += v * es[m - 1]
    total = 0.0 + 0.0j
    for j in range(1, c + 1):
        if a + j - c < 0 or bexp - a + c - j < 0:
            continue
        mag = math.exp(math.lgamma(bexp + 1) - math.lgamma(a + j - c + 1)
                       - math.lgamma(bexp - a + c - j + 1))
        total += (-1.0) ** (c - j) * mag * j * kappa ** (j - 1) * es[j]
    return total


def derz_oracle(b: float, spectrum: CorrelationSpectrum, params: EnsembleParams,
                eps_ladder=EPS_LADDER) -> float:
    """Level density from the two-fold-integral representation at finite eps.

    The |r1 - r2| coupling is reduced to iterated one-dimensional integrals
    via cumulative antiderivatives on a shared mesh graded to resolve the
    width-eps ridges at b/L_j; the density is -(1/(pi p)) times the imaginary
    part, extrapolated in sqrt(eps).
    """
    lam = spectrum.values
    p, n1, n2 = params.p, params.n1, params.n2
    mu = params.mu

    def one_eps(eps):
        kappa = complex(b, eps)
        edges = np.sort(b / lam)
        r0 = 3.0 * edges.max() + 3.0
        pieces = [np.linspace(0.0, r0, 6001),
                  np.geomspace(r0, 3e3 * max(1.0, b), 2001)]
        for s, l in zip(b / lam, lam):
            w = eps / l
            t = np.linspace(-math.asinh(0.5 * max(1.0, s) / w),
                            math.asinh(0.5 * max(1.0, s) / w), 4001)
            pieces.append(s + w * np.sinh(t))
        mesh = np.unique(np.concatenate(pieces))
        mesh = mesh[mesh >= 0.0]
        dm = np.diff(mesh)
        u = np.ones(len(mesh), dtype=complex)
        for l in lam:
            u = u / np.sqrt(kappa / l - mesh)
        one_plus = 1.0 + mesh

        def cumtrap(y):
            return np.concatenate([[0.0 + 0.0j],
                                   np.cumsum(0.5 * (y[1:] + y[:-1]) * dm)])

        def pair_integral(u1, u2):
            v0 = cumtrap(u2)
            v1 = cumtrap(u2 * mesh)
            inner = mesh * (2.0 * v0 - v0[-1]) - (2.0 * v1 - v1[-1])
            y = u1 * inner
            return np.sum(0.5 * (y[1:] + y[:-1]) * dm)

        a, c = n2 - 1, mu

        def r_part(d):
            return u * mesh ** ((a - 1 + d) / 2.0) * one_plus ** (-(c + 1 + d) / 2.0)

        def r_pole(j):
            return (u * mesh ** (a / 2.0) * one_plus ** (-c / 2.0)
                    / (kappa / lam[j - 1] - mesh))

        total = 0.125 * (
            mu * (mu - 1) * _c_complex(n2 - 2, mu - 2, p, kappa, lam)
            * pair_integral(r_part(+1), r_part(+1))
            - 2 * mu * (n2 - 1) * _c_complex(n2 - 1, mu - 1, p, kappa, lam)
            * pair_integral(r_part(+1), r_part(-1))
            + n2 * (n2 - 1) * _c_complex(n2, mu, p, kappa, lam)
            * pair_integral(r_part(-1), r_part(-1)))
        for j in range(1, p + 1):
            keep = np.delete(lam, j - 1)
            total += 0.25 * (
                mu * _c_complex(n2 - 2, mu - 1, p - 1, kappa, keep)
                * pair_integral(r_pole(j), r_part(+1))
                - (n2 - 1) * _c_complex(n2 - 1, mu, p - 1, kappa, keep)
                * pair_integral(r_pole(j), r_part(-1)))
        for i in range(1, p + 1):
            for j in range(i + 1, p + 1):
                keep = np.delete(lam, [i - 1, j - 1])
                total += 0.25 * (_c_complex(n2 - 2, mu, p - 2, kappa, keep)
                                 * pair_integral(r_pole(i), r_pole(j)))
        return (-1.0 / (math.pi * p)) * total.imag

    return _sqrt_eps_fit([one_eps(e) for e in eps_ladder], eps_ladder)


def haar_group_average(b, spectrum: CorrelationSpectrum, params: EnsembleParams,
                       num: int = 1_000_000, seed: int = 1234) -> tuple[float, float]:
    """Monte Carlo (mean, standard error) of det^{-n1-n2}(U b U^dag + C)."""
    rng = np.random.default_rng(seed)
    p = params.p
    bs = np.asarray(b, dtype=float)
    out_mean = 0.0
    out_m2 = 0.0
    done = 0
    for start in range(0, num, 200_000):
        m = min(200_000, num - start)
        z = (rng.standard_normal((m, p, p))
             + 1j * rng.standard_normal((m, p, p))) / math.sqrt(2.0)
        q, r = np.linalg.qr(z)
        d = np.einsum('nii->ni', r)
        q = q * (d / np.abs(d))[:, None, :]
        mats = ((q * bs[None, None, :]) @ np.conj(np.swapaxes(q, 1, 2))
                + np.diag(spectrum.values)[None])
        vals = np.linalg.det(mats).real ** (-(params.n1 + params.n2))
        # streaming mean/variance
        for chunkstat in (vals,):
            kn = len(chunkstat)
            new_mean = (out_mean * done + chunkstat.sum()) / (done + kn)
            out_m2 += ((chunkstat - new_mean) * (chunkstat - out_mean)).sum()
            out_mean = new_mean
            done += kn
    std_err = math.sqrt(out_m2 / (done - 1) / done)
    return out_mean, std_err


# ---------------------------------------------------------------------------
# deterministic (fast) checks
# ---------------------------------------------------------------------------

def _map_checks() -> list:
    checks = []
    xs = (-0.9, -0.5, 0.0, 0.5, 0.9)
    worst = max(abs(cl_to_jacobi_point(jacobi_to_cl_point(x)) - x) for x in xs)
    checks.append(_entry("model.map_round_trip", worst <= 4 * np.finfo(float).eps,
                         worst, "<= 4 ulps"))
    ctx = exact_complex.KernelContext(FIG1.params, FIG1.spectrum)
    grid = EvaluationGrid(tuple(np.geomspace(1e-3, 200.0, 1200)), "cauchy_lorentz")
    curve = exact_complex.cl_density_curve(ctx, grid)
    back = transport_density_jacobi_to_cl(transport_density_cl_to_jacobi(curve))
    worst = max(abs(u - v) for u, v in zip(back.values, curve.values))
    checks.append(_entry("model.transport_round_trip", worst < 1e-12, worst, "< 1e-12"))
    return checks


def _quadrature_checks() -> list:
    checks = []
    v = integrate_sqrt(lambda r: 1.0 / np.sqrt(r), Cell(0, 1, "half", "none"))
    checks.append(_entry("quad.inv_sqrt", abs(v - 2) < 1e-9, v, "2 +- 1e-9"))
    v = integrate_sqrt(lambda r: 1.0 / np.sqrt(r * (1 - r)), Cell(0, 1, "half", "half"))
    checks.append(_entry("quad.arcsine", abs(v - math.pi) < 1e-9, v, "pi +- 1e-9"))
    v = integrate_pv32(lambda r: np.full_like(np.asarray(r, float), 3.0),
                       Cell(0, 1, "none", "three_half"))
    checks.append(_entry("quad.pv_constant", abs(v + 6.0) < 1e-9, v, "-6 +- 1e-9"))
    v = integrate_pv32(lambda r: np.asarray(r, float), Cell(0, 1, "none", "three_half"))
    checks.append(_entry("quad.pv_linear", abs(v + 4.0) < 1e-9, v, "-4 +- 1e-9"))
    return checks


def _complex_checks() -> list:
    checks = []
    ctx = exact_complex.KernelContext(FIG1.params, FIG1.spectrum)
    mass = exact_complex.kernel_trace_mass(ctx)
    checks.append(_entry("complex.kernel_trace", abs(mass - 1) < 1e-8, mass,
                         "1 +- 1e-8"))
    x, z = 0.5, 1.5
    lhs = FIG1.params.p * integrate_sqrt(
        lambda t: np.array([exact_complex.cl_kernel(x, ti, ctx)
                            * exact_complex.cl_kernel(ti, z, ctx)
                            for ti in np.atleast_1d(t)]),
        Cell(0.0, math.inf), tol=1e-10)
    rhs = exact_complex.cl_kernel(x, z, ctx)
    checks.append(_entry("complex.projection_identity", abs(lhs - rhs) < 1e-8,
                         abs(lhs - rhs), "< 1e-8"))
    pts = [0.3, 1.1, 2.7]
    kp = exact_complex.k_point_correlation(pts, ctx)
    jp = exact_complex.joint_probability_density(pts, FIG1.spectrum, FIG1.params, ctx)
    rel = abs(kp - jp) / abs(jp)
    checks.append(_entry("complex.kpoint_equals_jpd", rel < 1e-10, rel, "< 1e-10 rel"))
    worst = 0.0
    for xx in (-0.5, 0.0, 0.5):
        bb = (1 - xx) / (1 + xx)
        lhs = exact_complex.jacobi_level_density_c(xx, ctx)
        rhs = 2.0 / (1 + xx) ** 2 * exact_complex.cl_kernel(bb, bb, ctx)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    checks.append(_entry("complex.closed_form_vs_transport", worst < 1e-10,
                         worst, "< 1e-10 rel"))
    mirror = exact_complex.KernelContext(FIG1.params.swapped(),
                                         FIG1.spectrum.inverse())
    worst = 0.0
    for xx in (-0.5, 0.0, 0.5):
        a = exact_complex.jacobi_level_density_c(xx, ctx)
        bsym = exact_complex.jacobi_level_density_c(-xx, mirror)
        worst = max(worst, abs(a - bsym) / abs(a))
    checks.append(_entry("complex.mirror_symmetry", worst < 1e-10, worst,
                         "< 1e-10 rel"))
    marg = integrate_sqrt(
        lambda t: np.array([exact_complex.k_point_correlation([0.9, ti], ctx)
                            for ti in np.atleast_1d(t)]),
        Cell(0.0, math.inf), tol=1e-9)
    r1 = exact_complex.k_point_correlation([0.9], ctx)
    checks.append(_entry("complex.marginalization", abs(marg - r1) < 1e-8,
                         abs(marg - r1), "< 1e-8"))
    p1 = EnsembleParams(1, 3, 4, 2)
    s1 = CorrelationSpectrum((2.0,))
    gi = exact_complex.hciz_cauchy_group_integral([0.8], s1, p1)
    ref = (0.8 + 2.0) ** (-7)
    checks.append(_entry("complex.group_integral_p1", abs(gi - ref) < 1e-14 * ref,
                         gi, f"{ref} (closed form)"))
    p2 = EnsembleParams(2, 3, 3, 2)
    s2 = CorrelationSpectrum((1.0, 4.0))
    gi = exact_complex.hciz_cauchy_group_integral([1.0, 2.0], s2, p2)
    s = 6.0
    a1 = (1.0 + 1.0) * (2.0 + 4.0)
    a2 = (2.0 + 1.0) * (1.0 + 4.0)
    ref = (a1 ** (1 - s) - a2 ** (1 - s)) / ((1 - s) * (1.0 - 2.0) * (4.0 - 1.0))
    checks.append(_entry("complex.group_integral_p2", abs(gi - ref) < 1e-13,
                         gi, f"{ref} (closed form)"))
    return checks


def _c_integral_checks(seed: int = 3) -> list:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        a = int(rng.integers(0, 8))
        bexp = int(rng.integers(0, 9))
        c = int(rng.integers(1, 5))
        kappa = float(rng.uniform(0.2, 2.5))
        energies = list(rng.uniform(0.3, 5.0, c))
        mine = exact_real.c_integral(a, bexp, c, kappa, energies)
        orc = c_fourier_oracle(a, bexp, c, kappa, energies)
        worst = max(worst, abs(mine - orc) / max(1.0, abs(orc)))
    return [_entry("real.c_integral_vs_fourier", worst < 1e-8, worst, "< 1e-8")]


def _g1_oracle_checks(seed: int = 11) -> list:
    ctx = exact_real.RealDensityContext(FIG2.params, FIG2.spectrum)
    p, n2, mu = FIG2.params.p, FIG2.params.n2, FIG2.params.mu
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10):
        a = int(rng.choice([n2 - 1, n2 + 1]))
        i = int(rng.integers(1, p + 1))
        l = int(rng.choice([p - i, p - i + 1]))
        b = float(rng.uniform(0.4, 2.5))
        mine = exact_real.g1(a, mu, l, i, b, ctx)
        orc = g1_adjacent_oracle(a, mu, l, i, b, FIG2.spectrum, p)
        expected = orc if l == p - i else -orc
        worst = max(worst, abs(mine - expected) / max(1e-12, abs(expected)))
    return [_entry("real.g1_adjacent_vs_eps_oracle", worst < 1e-4, worst, "< 1e-4")]


def _derz_oracle_checks() -> list:
    ctx = exact_real.RealDensityContext(FIG2.params, FIG2.spectrum)
    worst = 0.0
    for b in (0.4, 0.7, 1.3, 2.0, 3.5):
        mine = exact_real.cl_level_density_r(b, ctx)
        orc = derz_oracle(b, FIG2.spectrum, FIG2.params)
        worst = max(worst, abs(mine - orc) / abs(orc))
    return [_entry("real.density_vs_derz_oracle_p2", worst < 1e-3, worst,
                   "< 1e-3 rel at 5 grid points")]


def _real_symmetry_checks() -> list:
    ctx = exact_real.RealDensityContext(FIG2.params, FIG2.spectrum)
    mirror = exact_real.RealDensityContext(FIG2.params.swapped(),
                                           FIG2.spectrum.inverse())
    worst = 0.0
    for x in (-0.4, 0.2):
        a = exact_real.jacobi_level_density_r(x, ctx)
        b = exact_real.jacobi_level_density_r(-x, mirror)
        worst = max(worst, abs(a - b) / max(abs(a), 1e-12))
    checks = [_entry("real.mirror_symmetry", worst < 1e-3, worst, "< 1e-3 rel")]
    grid = EvaluationGrid.uniform_jacobi(161)
    curve = exact_real.jacobi_density_curve_r(ctx, grid)
    mass = curve.metadata["mass_pre_normalization"]
    checks.append(_entry("real.mass_pre_normalization", abs(mass - 1) < 1e-3,
                         mass, "1 +- 1e-3"))
    checks.append(_entry("real.clamp_small",
                         ctx.max_clamp < 1e-3 * max(curve.values),
                         ctx.max_clamp, "< 1e-3 * peak"))
    return checks


def _saddle_checks() -> list:
    checks = []
    spectrum, params = FIG3.spectrum, FIG3.params
    rng = np.random.default_rng(5)
    worst_res, conj_ok, worst_dual = 0.0, True, 0.0
    for b in list(rng.uniform(0.05, 50.0, 8)) + [500.0]:
        roots = asymptotic.saddle_roots(b, spectrum, params)
        conj_ok &= all(min(abs(np.conj(q) - roots)) < 1e-10 * (1 + abs(q))
                       for q in roots)
        sol = asymptotic.solve_saddle(b, spectrum, params)
        if sol.exists:
            worst_res = max(worst_res, sol.residual)
    checks.append(_entry("saddle.residuals", worst_res < 1e-10, worst_res, "< 1e-10"))
    checks.append(_entry("saddle.conjugation_closure", conj_ok, conj_ok,
                         "root sets closed under conjugation"))
    xs = np.linspace(-0.95, 0.85, 64)
    for x in xs:
        b = (1.0 - x) / (1.0 + x)
        sol = asymptotic.solve_saddle(b, spectrum, params)
        if not sol.exists:
            continue
        q = sol.q0
        p, n1, n2 = params.p, params.n1, params.n2
        compact = ((n1 + n2 - p) / (math.pi * p) / b
                   * q.imag / ((q.real + 1) ** 2 + q.imag ** 2))
        resolv = float(np.sum(spectrum.values * q.imag
                              / ((b - spectrum.values * q.real) ** 2
                                 + (spectrum.values * q.imag) ** 2))) / (math.pi * p)
        worst_dual = max(worst_dual, abs(compact - resolv))
    checks.append(_entry("saddle.dual_formula", worst_dual < 1e-8, worst_dual,
                         "< 1e-8 on 64-point grid"))
    checks.append(_entry("saddle.outside_support",
                         not asymptotic.solve_saddle(1e3 * max(spectrum.lambdas),
                                                     spectrum, params).exists,
                         "density 0", "no upper-half-plane saddle"))
    worst_q = 0.0
    for factor in (2, 3):
        lam = np.concatenate([spectrum.values * (1.0 + k * 1e-12)
                              for k in range(factor)])
        spec_l = CorrelationSpectrum(tuple(lam), min_gap=1e-13)
        par_l = EnsembleParams(params.p * factor, params.n1 * factor,
                               params.n2 * factor, params.beta)
        for b in (0.5, 3.0, 40.0):
            q1 = asymptotic.solve_saddle(b, spectrum, params).q0
            q2 = asymptotic.solve_saddle(b, spec_l, par_l).q0
            worst_q = max(worst_q, abs(q1 - q2))
    checks.append(_entry("saddle.degeneracy_invariance", worst_q < 1e-10, worst_q,
                         "< 1e-10 for l in {2,3}"))
    p = 16
    spec_lv = CorrelationSpectrum(tuple(1.0 + (j + 1) * 1e-6 for j in range(p)))
    par_lv = EnsembleParams(p, p, 2 * p, 2)
    bs = np.geomspace(1e2, 1e4, 25)
    dens = np.array([asymptotic.asymptotic_cl_density(b, spec_lv, par_lv)
                     for b in bs])
    slope = float(np.polyfit(np.log(bs), np.log(dens), 1)[0])
    checks.append(_entry("saddle.levy_tail_slope", abs(slope + 1.5) < 0.05,
                         slope, "-1.5 +- 0.05"))
    worst = 0.0
    mirror_spec = spectrum.inverse()
    mirror_par = params.swapped()
    for x in (-0.5, -0.1, 0.3):
        a = asymptotic.asymptotic_jacobi_density(x, spectrum, params)
        b = asymptotic.asymptotic_jacobi_density(-x, mirror_spec, mirror_par)
        worst = max(worst, abs(a - b))
    checks.append(_entry("saddle.mirror_symmetry", worst < 1e-8, worst, "< 1e-8"))
    return checks


def run_fast_checks() -> dict:
    t0 = time.time()
    checks = []
    checks += _map_checks()
    checks += _quadrature_checks()
    checks += _complex_checks()
    checks += _c_integral_checks()
    checks += _g1_oracle_checks()
    checks += _derz_oracle_checks()
    checks += _real_symmetry_checks()
    checks += _saddle_checks()
    return {"level": "fast", "passed": all(c["passed"] for c in checks),
            "elapsed_seconds": time.time() - t0, "checks": checks}


# ---------------------------------------------------------------------------
# Monte Carlo (full) checks
# ---------------------------------------------------------------------------

def fig1_reproduction(num_samples: int = 50_000, bins: int = 60,
                      seed: int = 123) -> dict:
    ctx = exact_complex.KernelContext(FIG1.params, FIG1.spectrum)
    batch = sampler.sample_jacobi(FIG1.params, FIG1.spectrum, num_samples, seed)
    stats = binned_l1_stats(batch.pooled(), bins,
                            lambda x: exact_complex.jacobi_level_density_c(x, ctx))
    stats["mass_residual"] = abs(exact_complex.kernel_trace_mass(ctx) - 1.0)
    return stats


def fig2_reproduction(num_samples: int = 50_000, bins: int = 60,
                      seed: int = 123) -> dict:
    ctx = exact_real.RealDensityContext(FIG2.params, FIG2.spectrum)
    curve = exact_real.jacobi_density_curve_r(ctx, EvaluationGrid.uniform_jacobi(161))
    mass = curve.metadata["mass_pre_normalization"]
    batch = sampler.sample_jacobi(FIG2.params, FIG2.spectrum, num_samples, seed)
    stats = binned_l1_stats(batch.pooled(), bins,
                            lambda x: exact_real.jacobi_level_density_r(x, ctx) / mass)
    stats["mass_pre_normalization"] = mass
    return stats


def fig3_reproduction(num_samples: int = 100_000, seed: int = 123) -> dict:
    spectrum, params = FIG3.spectrum, FIG3.params
    xs = np.linspace(-0.999999, 0.9995, 4001)
    dens = np.array([asymptotic.asymptotic_jacobi_density(x, spectrum, params)
                     for x in xs])
    support = xs[dens > 1e-9 * dens.max()]
    lo, hi = support.min(), support.max()
    width = hi - lo
    bulk_lo, bulk_hi = lo + 0.1 * width, hi - 0.1 * width
    out = {"support": (float(lo), float(hi)), "bulk": (float(bulk_lo), float(bulk_hi))}

    # the three outlier bumps: analytic local maxima below the bulk window,
    # located on a dedicated fine grid (the bump from the largest correlation
    # eigenvalue is only ~1e-3 wide in x)
    rx = np.linspace(lo, bulk_lo, 6001)
    rv = np.array([asymptotic.asymptotic_jacobi_density(x, spectrum, params)
                   for x in rx])
    peaks = [(float(rx[i]), float(rv[i])) for i in range(1, len(rv) - 1)
             if rv[i] > rv[i - 1] and rv[i] > rv[i + 1] and rv[i] > 1e-4]
    out["outlier_peaks"] = peaks

    edges = np.linspace(bulk_lo, bulk_hi, 41)
    probs = bin_probabilities(
        edges, lambda x: asymptotic.asymptotic_jacobi_density(x, spectrum, params))
    for beta in (1, 2):
        par_b = EnsembleParams(params.p, params.n1, params.n2, beta)
        batch = sampler.sample_jacobi(par_b, spectrum, num_samples, seed + beta)
        pooled = batch.pooled()
        counts, _ = np.histogram(pooled, bins=edges)
        frac = counts / len(pooled)
        out[f"bulk_l1_beta{beta}"] = float(np.abs(frac - probs).sum())
        # outlier bins: MC mass present in the bin around each analytic peak
        hits = []
        for px, _ in peaks:
            win = 0.004
            hits.append(bool(np.sum((pooled >= px - win) & (pooled <= px + win)) > 0))
        out[f"outlier_bins_hit_beta{beta}"] = hits
    return out


def run_full_checks(num_samples: int = 50_000, seed: int = 123) -> dict:
    t0 = time.time()
    result = run_fast_checks()
    checks = result["checks"]

    f1 = fig1_reproduction(num_samples=num_samples, seed=seed)
    checks.append(_entry("mc.fig1_binned_l1", f1["l1"] < f1["l1_bound_3sigma"],
                         f1["l1"], f"< {f1['l1_bound_3sigma']:.5f} (3 sigma)"))
    checks.append(_entry("mc.fig1_chi2_pvalue", f1["chi2_pvalue"] > 1e-3,
                         f1["chi2_pvalue"], "> 1e-3"))
    checks.append(_entry("mc.fig1_mass_residual", f1["mass_residual"] < 1e-6,
                         f1["mass_residual"], "< 1e-6"))

    f2 = fig2_reproduction(num_samples=num_samples, seed=seed)
    checks.append(_entry("mc.fig2_binned_l1", f2["l1"] < f2["l1_bound_3sigma"],
                         f2["l1"], f"< {f2['l1_bound_3sigma']:.5f} (3 sigma)"))
    checks.append(_entry("mc.fig2_mass_pre_normalization",
                         abs(f2["mass_pre_normalization"] - 1.0) < 1e-3,
                         f2["mass_pre_normalization"], "1 +- 1e-3"))

    cl_mapped = sampler.sample_cauchy_lorentz(FIG1.params, FIG1.spectrum,
                                              num_samples, seed + 7)
    cl_direct = sampler.sample_cauchy_lorentz_direct(FIG1.params, FIG1.spectrum,
                                                     num_samples, seed + 8)
    ks = scipy.stats.ks_2samp(cl_mapped.pooled(), cl_direct.pooled())
    checks.append(_entry("mc.cl_mapped_vs_direct_ks", ks.pvalue > 1e-3,
                         ks.pvalue, "> 1e-3"))

    jac = sampler.sample_jacobi(FIG1.params, FIG1.spectrum, num_samples, seed + 9)
    mirror = sampler.sample_jacobi(FIG1.params.swapped(), FIG1.spectrum.inverse(),
                                   num_samples, seed + 10)
    ks = scipy.stats.ks_2samp(-jac.pooled(), mirror.pooled())
    checks.append(_entry("mc.sampler_mirror_symmetry_ks", ks.pvalue > 1e-3,
                         ks.pvalue, "> 1e-3"))

    p2 = EnsembleParams(2, 3, 3, 2)
    s2 = CorrelationSpectrum((1.0, 4.0))
    mc, se = haar_group_average([1.0, 2.0], s2, p2, num=1_000_000, seed=seed)
    gi = exact_complex.hciz_cauchy_group_integral([1.0, 2.0], s2, p2)
    checks.append(_entry("mc.group_integral_haar", abs(gi - mc) < 3 * se,
                         gi, f"{mc} +- {3 * se} (3 sigma)"))

    f3 = fig3_reproduction(num_samples=2 * num_samples, seed=seed)
    for beta in (1, 2):
        checks.append(_entry(f"mc.fig3_bulk_l1_beta{beta}",
                             f3[f"bulk_l1_beta{beta}"] < 0.05,
                             f3[f"bulk_l1_beta{beta}"], "< 0.05"))
        checks.append(_entry(f"mc.fig3_outliers_beta{beta}",
                             len(f3["outlier_peaks"]) == 3
                             and all(f3[f"outlier_bins_hit_beta{beta}"]),
                             f3["outlier_peaks"], "3 bumps, MC mass in each"))

    return {"level": "full", "passed": all(c["passed"] for c in checks),
            "elapsed_seconds": time.time() - t0, "checks": checks}
