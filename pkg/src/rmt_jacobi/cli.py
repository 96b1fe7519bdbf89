"""Command-line front end: sampling, density evaluation, comparison, verification.

Usage:
    rmt-jacobi sample|density|compare|verify --config <path> [--dotted.name value ...]

Any configuration field can be overridden on the command line by its dotted
path (e.g. ``--mc.seed 7`` or ``--output.csv_path out.csv``).  CSV is the
canonical numeric format (headers ``coordinate,density,method``); JSON
sidecars carry provenance (config echo, seed, timings, residuals, calibration
logs).  Output files are written atomically.

Exit codes: 0 success, 2 usage error, 3 numerical/accuracy error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import tempfile
import time

import numpy as np
import scipy.linalg

from . import asymptotic, exact_complex, exact_real, sampler, verify
from ._svg import render_svg
from .errors import AccuracyError, NumericalError, RejectedInputError
from .model import (CAUCHY_LORENTZ, JACOBI, CorrelationSpectrum, DensityCurve,
                    EnsembleParams, EvaluationGrid)
from .presets import PRESETS

METHODS = ("mc", "exact", "asymptotic", "all")
ENSEMBLES = {"jacobi": JACOBI, "cl": CAUCHY_LORENTZ}


class UsageError(RejectedInputError):
    """Bad command line or configuration; maps to exit code 2."""


def worker_count() -> int:
    raw = os.environ.get("RMT_JACOBI_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"RMT_JACOBI_THREADS must be an integer, got {raw!r}")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _set_dotted(cfg: dict, dotted: str, raw: str):
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    keys = dotted.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise UsageError(f"cannot override non-object field {dotted!r}")
    node[keys[-1]] = value


def load_config(path: str | None, overrides: list[str]) -> dict:
    cfg: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(cfg, dict):
            raise UsageError("config root must be a JSON object")
    tokens = list(overrides)
    while tokens:
        tok = tokens.pop(0)
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        name = tok[2:]
        if "=" in name:
            name, raw = name.split("=", 1)
        else:
            if not tokens:
                raise UsageError(f"override {tok!r} is missing a value")
            raw = tokens.pop(0)
        _set_dotted(cfg, name, raw)
    return cfg


def _resolve_spectrum(cfg: dict) -> tuple[EnsembleParams, CorrelationSpectrum]:
    preset_name = cfg.get("preset")
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise UsageError(f"unknown preset {preset_name!r}; "
                             f"have {sorted(PRESETS)}")
        preset = PRESETS[preset_name]
        params_cfg = dict(p=preset.params.p, n1=preset.params.n1,
                          n2=preset.params.n2, beta=preset.params.beta)
        params_cfg.update(cfg.get("params", {}))
        spec_cfg = cfg.get("spectrum", {"lambdas": list(preset.spectrum.lambdas)})
    else:
        params_cfg = cfg.get("params")
        if params_cfg is None:
            raise UsageError("config.params is required (p, n1, n2, beta)")
        spec_cfg = cfg.get("spectrum")
        if spec_cfg is None:
            raise UsageError("config.spectrum is required")
    try:
        params = EnsembleParams(int(params_cfg["p"]), int(params_cfg["n1"]),
                                int(params_cfg["n2"]), int(params_cfg["beta"]))
    except KeyError as exc:
        raise UsageError(f"config.params is missing field {exc}")

    sources = [k for k in ("lambdas", "c_f", "recipe", "preset") if k in spec_cfg]
    if len(sources) != 1:
        raise UsageError("config.spectrum must have exactly one source: "
                         "lambdas | c_f+c_b | recipe | preset")
    source = sources[0]
    if source == "preset":
        name = spec_cfg["preset"]
        if name not in PRESETS:
            raise UsageError(f"unknown spectrum preset {name!r}")
        spectrum = PRESETS[name].spectrum
    elif source == "lambdas":
        spectrum = CorrelationSpectrum(tuple(float(v) for v in spec_cfg["lambdas"]))
    elif source == "c_f":
        if "c_b" not in spec_cfg:
            raise UsageError("config.spectrum.c_f requires config.spectrum.c_b")
        c_f = np.asarray(spec_cfg["c_f"], dtype=float)
        c_b = np.asarray(spec_cfg["c_b"], dtype=float)
        for name, mat in (("c_f", c_f), ("c_b", c_b)):
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise UsageError(f"config.spectrum.{name} must be a square matrix")
            if not np.allclose(mat, mat.T, atol=1e-12):
                raise UsageError(f"config.spectrum.{name} must be symmetric")
        if c_f.shape != c_b.shape or c_f.shape[0] != params.p:
            raise UsageError("covariance matrices must be p x p")
        # eigenvalues of C_F^{-1/2} C_B C_F^{-1/2} == generalized pair (C_B, C_F)
        lam = scipy.linalg.eigh(c_b, c_f, eigvals_only=True)
        spectrum = CorrelationSpectrum(tuple(lam))
    else:
        recipe = spec_cfg["recipe"]
        count = int(recipe.get("count", params.p))
        dist = recipe.get("distribution", "abs_gaussian")
        if dist != "abs_gaussian":
            raise UsageError(f"unknown spectrum recipe distribution {dist!r}")
        sigma = float(recipe.get("sigma", 1.0))
        rng = np.random.default_rng(int(recipe.get("seed", 0)))
        lam = np.abs(rng.normal(0.0, sigma, count))
        spectrum = CorrelationSpectrum(tuple(lam))
    if len(spectrum) != params.p:
        raise UsageError(f"spectrum has {len(spectrum)} eigenvalues but p={params.p}")
    return params, spectrum


def _resolve_grid(cfg: dict, ensemble: str,
                  spectrum: CorrelationSpectrum) -> EvaluationGrid:
    grid_cfg = cfg.get("grid", {})
    if "points" in grid_cfg:
        return EvaluationGrid(tuple(float(v) for v in grid_cfg["points"]), ensemble)
    num = int(grid_cfg.get("num", 512))
    if ensemble == JACOBI:
        return EvaluationGrid.uniform_jacobi(num, float(grid_cfg.get("margin", 1e-3)))
    lo = float(grid_cfg.get("lower", 1e-3))
    hi = float(grid_cfg.get("upper", 10.0 * max(spectrum.lambdas)))
    return EvaluationGrid.uniform_cl(lo, hi, num)


def _mc_block(cfg: dict) -> dict:
    mc = cfg.get("mc")
    if mc is None:
        raise UsageError("config.mc is required (num_samples, bins, seed)")
    out = {"num_samples": int(mc.get("num_samples", 0)),
           "bins": int(mc.get("bins", 60)),
           "seed": int(mc.get("seed", 0))}
    if out["num_samples"] < 1:
        raise UsageError("config.mc.num_samples must be positive")
    if out["bins"] < 2:
        raise UsageError("config.mc.bins must be at least 2")
    return out


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rmtj-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _curves_csv(curves: list[DensityCurve]) -> str:
    lines = ["coordinate,density,method"]
    for curve in curves:
        for x, y in zip(curve.grid.points, curve.values):
            lines.append(f"{x!r},{y!r},{curve.method}")
    return "\n".join(lines) + "\n"


def _samples_csv(batch: sampler.SampleBatch) -> str:
    header = ",".join(f"eigenvalue_{k + 1}" for k in range(batch.params.p))
    lines = [header]
    for row in batch.eigenvalues:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _sidecar(cfg: dict, command: str, started: float, **extra) -> str:
    doc = {"command": command, "config": cfg,
           "elapsed_seconds": time.time() - started}
    doc.update(extra)
    return json.dumps(doc, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _output_paths(cfg: dict, default_stem: str) -> dict:
    out = cfg.get("output", {})
    stem = out.get("stem", default_stem)
    return {"csv": out.get("csv_path", f"{stem}.csv"),
            "json": out.get("json_path", f"{stem}.json"),
            "svg": out.get("svg_path")}


# ---------------------------------------------------------------------------
# curve production
# ---------------------------------------------------------------------------

def _exact_curve(params, spectrum, grid, ensemble) -> DensityCurve:
    if params.beta == 2:
        ctx = exact_complex.KernelContext(params, spectrum)
        if ensemble == JACOBI:
            return exact_complex.jacobi_density_curve(ctx, grid)
        return exact_complex.cl_density_curve(ctx, grid)
    if params.p > 12:
        print(f"warning: exact beta=1 density at p={params.p} needs O(p^4) "
              "quadratures per point; expect long runtimes", file=sys.stderr)
    ctx = exact_real.RealDensityContext(params, spectrum)
    workers = worker_count()
    if ensemble == JACOBI:
        return exact_real.jacobi_density_curve_r(ctx, grid, workers=workers)
    return exact_real.cl_density_curve_r(ctx, grid, workers=workers)


def _asymptotic_curve(params, spectrum, grid, ensemble) -> DensityCurve:
    if ensemble == JACOBI:
        return asymptotic.jacobi_density_curve(spectrum, params, grid)
    return asymptotic.cl_density_curve(spectrum, params, grid)


def _mc_curve(params, spectrum, ensemble, mc) -> tuple[sampler.SampleBatch, DensityCurve]:
    if ensemble == JACOBI:
        batch = sampler.sample_jacobi(params, spectrum, mc["num_samples"], mc["seed"])
    else:
        batch = sampler.sample_cauchy_lorentz(params, spectrum,
                                              mc["num_samples"], mc["seed"])
    return batch, sampler.histogram(batch, mc["bins"])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_sample(cfg: dict) -> int:
    started = time.time()
    params, spectrum = _resolve_spectrum(cfg)
    ensemble = ENSEMBLES.get(cfg.get("ensemble", "jacobi"))
    if ensemble is None:
        raise UsageError(f"unknown ensemble {cfg.get('ensemble')!r}")
    mc = _mc_block(cfg)
    batch, hist = _mc_curve(params, spectrum, ensemble, mc)
    paths = _output_paths(cfg, "samples")
    samples_path = os.path.splitext(paths["csv"])[0] + "_samples.csv"
    _atomic_write(samples_path, _samples_csv(batch))
    _atomic_write(paths["csv"], _curves_csv([hist]))
    _atomic_write(paths["json"], _sidecar(
        cfg, "sample", started, seed=mc["seed"],
        num_samples=mc["num_samples"], ensemble=ensemble,
        samples_csv=samples_path, histogram_csv=paths["csv"],
        histogram_metadata=hist.metadata))
    return 0


def cmd_density(cfg: dict) -> int:
    started = time.time()
    params, spectrum = _resolve_spectrum(cfg)
    ensemble = ENSEMBLES.get(cfg.get("ensemble", "jacobi"))
    if ensemble is None:
        raise UsageError(f"unknown ensemble {cfg.get('ensemble')!r}")
    method = cfg.get("method", "exact")
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; have {METHODS}")
    grid = _resolve_grid(cfg, ensemble, spectrum)
    curves = []
    meta: dict = {}
    if method in ("exact", "all"):
        curve = _exact_curve(params, spectrum, grid, ensemble)
        curves.append(curve)
        meta["exact"] = {"normalization_residual": curve.normalization_residual,
                         **curve.metadata}
    if method in ("asymptotic", "all"):
        curve = _asymptotic_curve(params, spectrum, grid, ensemble)
        curves.append(curve)
        meta["asymptotic"] = {"normalization_residual": curve.normalization_residual}
    if method in ("mc", "all"):
        mc = _mc_block(cfg)
        _, hist = _mc_curve(params, spectrum, ensemble, mc)
        curves.append(hist)
        meta["monte_carlo"] = hist.metadata
    paths = _output_paths(cfg, "density")
    _atomic_write(paths["csv"], _curves_csv(curves))
    _atomic_write(paths["json"], _sidecar(cfg, "density", started, **meta))
    if paths["svg"]:
        series = [{"x": list(c.grid.points), "y": list(c.values),
                   "label": c.method,
                   "kind": "bars" if c.method == "monte_carlo" else "line"}
                  for c in curves]
        _atomic_write(paths["svg"], render_svg(series, title="level density"))
    return 0


def cmd_compare(cfg: dict) -> int:
    started = time.time()
    params, spectrum = _resolve_spectrum(cfg)
    ensemble = ENSEMBLES.get(cfg.get("ensemble", "jacobi"))
    if ensemble is None:
        raise UsageError(f"unknown ensemble {cfg.get('ensemble')!r}")
    method = cfg.get("method", "all")
    wanted = ("exact", "asymptotic") if method == "all" else (method,)
    mc = _mc_block(cfg)
    batch, hist = _mc_curve(params, spectrum, ensemble, mc)
    grid = _resolve_grid(cfg, ensemble, spectrum)
    curves = [hist]
    summary: dict = {"num_samples": mc["num_samples"], "seed": mc["seed"]}

    analytic_fns = {}
    if "exact" in wanted or method == "exact":
        curve = _exact_curve(params, spectrum, grid, ensemble)
        curves.append(curve)
        if params.beta == 2:
            ctx = exact_complex.KernelContext(params, spectrum)
            fn = (lambda x: exact_complex.jacobi_level_density_c(x, ctx)) \
                if ensemble == JACOBI else \
                (lambda x: exact_complex.cl_level_density_c(x, ctx))
        else:
            rctx = exact_real.RealDensityContext(params, spectrum)
            mass = curve.metadata.get("mass_pre_normalization", 1.0)
            fn = (lambda x: exact_real.jacobi_level_density_r(x, rctx) / mass) \
                if ensemble == JACOBI else \
                (lambda x: exact_real.cl_level_density_r(x, rctx) / mass)
            summary["exact_real_calibration"] = curve.metadata
        analytic_fns["exact"] = fn
    if "asymptotic" in wanted or method == "asymptotic":
        curves.append(_asymptotic_curve(params, spectrum, grid, ensemble))
        if ensemble == JACOBI:
            analytic_fns["asymptotic"] = (
                lambda x: asymptotic.asymptotic_jacobi_density(x, spectrum, params))
        else:
            analytic_fns["asymptotic"] = (
                lambda x: asymptotic.asymptotic_cl_density(x, spectrum, params))

    for name, fn in analytic_fns.items():
        summary[name] = verify.binned_l1_stats(batch.pooled(), mc["bins"], fn)

    paths = _output_paths(cfg, "compare")
    _atomic_write(paths["csv"], _curves_csv(curves))
    _atomic_write(paths["json"], _sidecar(cfg, "compare", started, summary=summary))
    if paths["svg"]:
        series = [{"x": list(c.grid.points), "y": list(c.values),
                   "label": c.method,
                   "kind": "bars" if c.method == "monte_carlo" else "line"}
                  for c in curves]
        _atomic_write(paths["svg"], render_svg(series, title="method comparison"))
    return 0


def cmd_verify(cfg: dict) -> int:
    started = time.time()
    level = cfg.get("level", "fast")
    if level not in ("fast", "full"):
        raise UsageError(f"verify level must be fast or full, got {level!r}")
    report = (verify.run_fast_checks() if level == "fast"
              else verify.run_full_checks())
    for check in report["checks"]:
        mark = "PASS" if check["passed"] else "FAIL"
        print(f"[{mark}] {check['name']}: value={check['value']} "
              f"target={check['target']}")
    print(f"{report['level']} verification "
          f"{'passed' if report['passed'] else 'FAILED'} "
          f"in {report['elapsed_seconds']:.1f}s")
    out = cfg.get("output", {})
    if out.get("json_path"):
        _atomic_write(out["json_path"], _sidecar(cfg, "verify", started, **report))
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rmt-jacobi",
        description="Eigenvalue statistics of correlated Jacobi / "
                    "Cauchy-Lorentz ensembles")
    parser.add_argument("command", choices=("sample", "density", "compare", "verify"))
    parser.add_argument("--config", default=None, help="JSON configuration file")
    args, overrides = parser.parse_known_args(argv)
    handlers = {"sample": cmd_sample, "density": cmd_density,
                "compare": cmd_compare, "verify": cmd_verify}
    try:
        cfg = load_config(args.config, overrides)
        return handlers[args.command](copy.deepcopy(cfg))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except RejectedInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except (AccuracyError, NumericalError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
