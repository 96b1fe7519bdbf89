import numpy as np
import pytest
import scipy.stats

from rmt_jacobi.errors import RejectedInputError
from rmt_jacobi.model import CorrelationSpectrum, EnsembleParams
from rmt_jacobi.presets import FIG1
from rmt_jacobi.sampler import (histogram, sample_cauchy_lorentz,
                                sample_cauchy_lorentz_direct,
                                sample_correlated_gaussian, sample_jacobi)


def test_gaussian_identity_covariance_trace():
    rng = np.random.default_rng(0)
    rows, cols, draws = 4, 25, 10_000
    vals = np.empty(draws)
    for k in range(draws):
        f = sample_correlated_gaussian(rows, cols, 1, np.ones(rows), rng)
        vals[k] = np.trace(f @ f.T) / (cols * rows)
    se = vals.std(ddof=1) / np.sqrt(draws)
    assert abs(vals.mean() - 1.0) < 3 * se


def test_gaussian_row_variances_follow_covariance():
    rng = np.random.default_rng(1)
    lam = np.array([0.5, 2.0, 9.0])
    f = sample_correlated_gaussian(3, 200_000, 1, np.sqrt(lam), rng)
    emp = f.var(axis=1)
    assert np.allclose(emp, lam, rtol=0.03)


def test_gaussian_complex_second_moment():
    rng = np.random.default_rng(2)
    f = sample_correlated_gaussian(1, 100_000, 2, np.ones(1), rng)
    mags = np.abs(f.ravel()) ** 2
    se = mags.std(ddof=1) / np.sqrt(mags.size)
    assert abs(mags.mean() - 1.0) < 3 * se


def test_gaussian_rejections():
    rng = np.random.default_rng(0)
    with pytest.raises(RejectedInputError):
        sample_correlated_gaussian(0, 5, 1, np.ones(0), rng)
    with pytest.raises(RejectedInputError):
        sample_correlated_gaussian(2, 5, 1, np.array([1.0, -1.0]), rng)
    with pytest.raises(RejectedInputError):
        sample_correlated_gaussian(2, 5, 3, np.ones(2), rng)


def test_jacobi_eigenvalues_inside_interval_minimal_case():
    params = EnsembleParams(1, 1, 1, 2)
    batch = sample_jacobi(params, CorrelationSpectrum((1.0,)), 2000, 5)
    assert np.all(batch.eigenvalues > -1.0) and np.all(batch.eigenvalues < 1.0)


def test_seed_determinism_and_prefix_stability():
    long = sample_jacobi(FIG1.params, FIG1.spectrum, 300, 42)
    again = sample_jacobi(FIG1.params, FIG1.spectrum, 300, 42)
    short = sample_jacobi(FIG1.params, FIG1.spectrum, 100, 42)
    assert np.array_equal(long.eigenvalues, again.eigenvalues)
    # per-sample substreams: a shorter run is a prefix of a longer one
    assert np.array_equal(long.eigenvalues[:100], short.eigenvalues)


def test_cl_positive_and_transform_identity():
    cl = sample_cauchy_lorentz(FIG1.params, FIG1.spectrum, 2000, 7)
    jac = sample_jacobi(FIG1.params, FIG1.spectrum, 2000, 7)
    assert np.all(cl.eigenvalues > 0.0)
    # per-sample deterministic map: means agree exactly
    assert np.isclose(np.mean(1.0 / (1.0 + cl.pooled())),
                      np.mean((1.0 + jac.pooled()) / 2.0), rtol=0, atol=1e-14)


def test_cl_mapped_vs_direct_distributional_equality():
    mapped = sample_cauchy_lorentz(FIG1.params, FIG1.spectrum, 50_000, 11)
    direct = sample_cauchy_lorentz_direct(FIG1.params, FIG1.spectrum, 50_000, 12)
    ks = scipy.stats.ks_2samp(mapped.pooled(), direct.pooled())
    assert ks.pvalue > 1e-3


def test_mirror_symmetry_of_batches():
    batch = sample_jacobi(FIG1.params, FIG1.spectrum, 50_000, 13)
    mirror = sample_jacobi(FIG1.params.swapped(), FIG1.spectrum.inverse(),
                           50_000, 14)
    ks = scipy.stats.ks_2samp(-batch.pooled(), mirror.pooled())
    assert ks.pvalue > 1e-3


def test_histogram_single_sample_two_bins():
    params = EnsembleParams(1, 1, 1, 2)
    batch = sample_jacobi(params, CorrelationSpectrum((1.0,)), 1, 3)
    curve = histogram(batch, 2)
    widths = np.diff(curve.metadata["bin_edges"])
    masses = curve.array * widths
    assert np.isclose(masses.sum(), 1.0, rtol=0, atol=1e-12)
    assert np.count_nonzero(curve.array) <= 1 or len(set(curve.values)) <= 2


def test_histogram_normalization_exact():
    batch = sample_jacobi(FIG1.params, FIG1.spectrum, 500, 3)
    curve = histogram(batch, 37)
    widths = np.diff(curve.metadata["bin_edges"])
    assert np.isclose(float(np.dot(curve.array, widths)), 1.0, rtol=0, atol=1e-12)


def test_fig1_histogram_shape():
    batch = sample_jacobi(FIG1.params, FIG1.spectrum, 50_000, 123)
    curve = histogram(batch, 60)
    peak_x = curve.grid.array[int(np.argmax(curve.array))]
    assert -1.0 < peak_x < -0.5          # pronounced peak near the lower edge
    assert batch.eigenvalues.min() > -1.0 and batch.eigenvalues.max() < 1.0


def test_histogram_rejections():
    batch = sample_jacobi(FIG1.params, FIG1.spectrum, 10, 3)
    with pytest.raises(RejectedInputError):
        histogram(batch, 1)
    with pytest.raises(RejectedInputError):
        sample_jacobi(FIG1.params, FIG1.spectrum, 0, 3)
