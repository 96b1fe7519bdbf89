"""Monte Carlo sampling of the correlated Jacobi and Cauchy-Lorentz ensembles.

A Jacobi sample is H = A^{-1/2} (FF^ - BB^) A^{-1/2} with A = FF^ + BB^,
which shares its spectrum with the defining ratio but keeps the eigenproblem
Hermitian.  F carries identity covariance and B the covariance diag(L): the
statistics depend on the two covariances only through the eigenvalues of the
effective correlation matrix, so the artifact works in its eigenbasis
throughout.

Reproducibility contract: each sample draws from its own RNG substream
derived from (seed, sample index), so chunked, parallel and serial runs all
produce bit-identical batches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, RejectedInputError
from .model import (CAUCHY_LORENTZ, JACOBI, CorrelationSpectrum, DensityCurve,
                    EnsembleParams, EvaluationGrid)

_CHUNK = 512


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Eigenvalue draws, one sorted row per sample."""

    eigenvalues: np.ndarray          # shape (num_samples, p)
    seed: int
    params: EnsembleParams
    spectrum: CorrelationSpectrum
    ensemble_tag: str

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", ev)
        if ev.ndim != 2 or ev.shape[1] != self.params.p or ev.shape[0] < 1:
            raise RejectedInputError(f"eigenvalue array has bad shape {ev.shape}")
        if self.ensemble_tag not in (JACOBI, CAUCHY_LORENTZ):
            raise RejectedInputError(f"unknown ensemble tag {self.ensemble_tag!r}")
        if np.any(np.diff(ev, axis=1) < 0.0):
            raise RejectedInputError("rows must be sorted ascending")
        if self.ensemble_tag == JACOBI:
            if np.any(ev <= -1.0) or np.any(ev >= 1.0):
                raise RejectedInputError("jacobi eigenvalues must lie in (-1, 1)")
        elif np.any(ev <= 0.0):
            raise RejectedInputError("cauchy_lorentz eigenvalues must be positive")

    @property
    def num_samples(self) -> int:
        return self.eigenvalues.shape[0]

    def pooled(self) -> np.ndarray:
        return self.eigenvalues.ravel()


def sample_correlated_gaussian(rows: int, cols: int, beta: int, sqrt_cov,
                               rng: np.random.Generator) -> np.ndarray:
    """diag(sqrt_cov) @ G with iid standard (complex for beta=2) normal G.

    Complex entries have independent real/imaginary parts of variance 1/2
    each, so <|G_ij|^2> = 1 for both symmetry classes and <F F^>/cols
    reproduces the covariance.
    """
    sc = np.atleast_1d(np.asarray(sqrt_cov, dtype=float))
    if sc.size == 1:
        sc = np.full(rows, float(sc[0]))
    if rows < 1 or cols < 1:
        raise RejectedInputError("matrix dimensions must be positive")
    if sc.shape != (rows,) or np.any(sc <= 0.0):
        raise RejectedInputError("sqrt_cov must be positive with one entry per row")
    if beta == 1:
        g = rng.standard_normal((rows, cols))
    elif beta == 2:
        g = (rng.standard_normal((rows, cols))
             + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)
    else:
        raise RejectedInputError(f"beta must be 1 or 2, got {beta!r}")
    return sc[:, None] * g


def _jacobi_eigs_chunk(params: EnsembleParams, sqrt_lam: np.ndarray,
                       children, first_index: int) -> np.ndarray:
    p, beta = params.p, params.beta
    m = len(children)
    fs = np.empty((m, p, params.n1), dtype=complex if beta == 2 else float)
    bs = np.empty((m, p, params.n2), dtype=complex if beta == 2 else float)
    ones = np.ones(p)
    for k, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        fs[k] = sample_correlated_gaussian(p, params.n1, beta, ones, rng)
        bs[k] = sample_correlated_gaussian(p, params.n2, beta, sqrt_lam, rng)
    fh = fs @ np.conj(np.swapaxes(fs, 1, 2))
    bh = bs @ np.conj(np.swapaxes(bs, 1, 2))
    asum = fh + bh
    diff = fh - bh
    try:
        w, v = np.linalg.eigh(asum)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigensolver failed on F F^ + B B^ near sample {first_index}") from exc
    if np.any(w <= 0.0):
        bad = first_index + int(np.argwhere(np.any(w <= 0.0, axis=1))[0, 0])
        raise NumericalError(f"F F^ + B B^ not positive definite at sample {bad}")
    inv_root = (v * (w ** -0.5)[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
    h = inv_root @ diff @ inv_root
    h = 0.5 * (h + np.conj(np.swapaxes(h, 1, 2)))
    try:
        eigs = np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigensolver failed on the symmetrized ratio near sample {first_index}"
        ) from exc
    return eigs


def sample_jacobi(params: EnsembleParams, spectrum: CorrelationSpectrum,
                  num_samples: int, seed: int) -> SampleBatch:
    """Draw eigenvalue samples of the correlated Jacobi ensemble."""
    if len(spectrum) != params.p:
        raise RejectedInputError(
            f"spectrum has {len(spectrum)} eigenvalues, expected p={params.p}")
    if num_samples < 1:
        raise RejectedInputError("num_samples must be positive")
    sqrt_lam = np.sqrt(spectrum.values)
    children = np.random.SeedSequence(seed).spawn(num_samples)
    out = np.empty((num_samples, params.p))
    for start in range(0, num_samples, _CHUNK):
        stop = min(start + _CHUNK, num_samples)
        out[start:stop] = _jacobi_eigs_chunk(params, sqrt_lam,
                                             children[start:stop], start)
    if np.any(np.abs(out) >= 1.0):
        bad = int(np.argwhere(np.any(np.abs(out) >= 1.0, axis=1))[0, 0])
        raise NumericalError(f"eigenvalue escaped (-1, 1) at sample {bad}")
    return SampleBatch(out, seed, params, spectrum, JACOBI)


def sample_cauchy_lorentz(params: EnsembleParams, spectrum: CorrelationSpectrum,
                          num_samples: int, seed: int) -> SampleBatch:
    """Cauchy-Lorentz eigenvalues via b = (1-x)/(1+x) applied to Jacobi draws.

    The two ensembles share their spectral statistics under this map, so the
    transformed draws are exact Cauchy-Lorentz samples.
    """
    jac = sample_jacobi(params, spectrum, num_samples, seed)
    b = (1.0 - jac.eigenvalues) / (1.0 + jac.eigenvalues)
    return SampleBatch(b[:, ::-1], seed, params, spectrum, CAUCHY_LORENTZ)


def sample_cauchy_lorentz_direct(params: EnsembleParams,
                                 spectrum: CorrelationSpectrum,
                                 num_samples: int, seed: int) -> SampleBatch:
    """Independent route: generalized eigenvalues of (B B^, F F^).

    Solves B B^ v = b F F^ v sample by sample, never forming the Jacobi
    matrix or the map b = (1-x)/(1+x); used as the distributional-equality
    referee for sample_cauchy_lorentz.
    """
    if len(spectrum) != params.p:
        raise RejectedInputError(
            f"spectrum has {len(spectrum)} eigenvalues, expected p={params.p}")
    if num_samples < 1:
        raise RejectedInputError("num_samples must be positive")
    p, beta = params.p, params.beta
    sqrt_lam = np.sqrt(spectrum.values)
    ones = np.ones(p)
    children = np.random.SeedSequence(seed).spawn(num_samples)
    out = np.empty((num_samples, p))
    for k, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        f = sample_correlated_gaussian(p, params.n1, beta, ones, rng)
        b = sample_correlated_gaussian(p, params.n2, beta, sqrt_lam, rng)
        fh = f @ np.conj(f.T)
        bh = b @ np.conj(b.T)
        try:
            out[k] = scipy.linalg.eigh(bh, fh, eigvals_only=True)
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise NumericalError(f"generalized eigensolver failed at sample {k}") from exc
    if np.any(out <= 0.0):
        bad = int(np.argwhere(np.any(out <= 0.0, axis=1))[0, 0])
        raise NumericalError(f"nonpositive eigenvalue at sample {bad}")
    return SampleBatch(out, seed, params, spectrum, CAUCHY_LORENTZ)


def histogram(batch: SampleBatch, bins: int) -> DensityCurve:
    """Density-normalized histogram of the pooled eigenvalues."""
    if bins < 2:
        raise RejectedInputError("need at least 2 bins")
    values, edges = np.histogram(batch.pooled(), bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    grid = EvaluationGrid(tuple(centers), batch.ensemble_tag)
    meta = {"bin_edges": [float(e) for e in edges],
            "num_samples": batch.num_samples, "seed": batch.seed}
    # sum(value * width) = 1 exactly by construction
    return DensityCurve(grid, tuple(values), "monte_carlo", 0.0, meta)
