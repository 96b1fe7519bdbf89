"""Bundled parameter sets for the three reference reproductions."""

from __future__ import annotations

from dataclasses import dataclass

from .model import CorrelationSpectrum, EnsembleParams


@dataclass(frozen=True)
class ParameterPreset:
    name: str
    params: EnsembleParams
    spectrum: CorrelationSpectrum
    num_samples: int
    bins: int


FIG1 = ParameterPreset(
    name="fig1",
    params=EnsembleParams(p=3, n1=5, n2=7, beta=2),
    spectrum=CorrelationSpectrum((1.0 / 3.0, 2.0, 4.5)),
    num_samples=50_000,
    bins=60,
)

FIG2 = ParameterPreset(
    name="fig2",
    params=EnsembleParams(p=2, n1=5, n2=5, beta=1),
    spectrum=CorrelationSpectrum((1.0, 4.0)),
    num_samples=50_000,
    bins=60,
)

# 32 correlation eigenvalues of the large-matrix reference run
_FIG3_LAMBDAS = (
    294.845, 34.679, 30.311, 11.612, 10.733, 9.468, 8.232, 5.307, 4.144,
    2.443, 2.429, 2.218, 2.083, 1.986, 1.406, 1.382, 1.102, 1.001, 0.889,
    0.707, 0.693, 0.684, 0.665, 0.63, 0.594, 0.591, 0.576, 0.574, 0.562,
    0.467, 0.463, 0.455,
)

FIG3 = ParameterPreset(
    name="fig3",
    params=EnsembleParams(p=32, n1=71, n2=68, beta=2),
    spectrum=CorrelationSpectrum(_FIG3_LAMBDAS),
    num_samples=100_000,
    bins=80,
)

PRESETS = {preset.name: preset for preset in (FIG1, FIG2, FIG3)}
