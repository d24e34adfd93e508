"""Command-line interface.

Subcommands: ``synth`` (write a synthetic spectrum), ``analyze`` (coherence
estimate from a spectrum file), ``fit`` (model fit with optional frozen
parameters), ``figures`` (standard figure products as CSV + SVG), and
``mimic`` (full-coherence alias of a parameter point).

Every subcommand accepts ``--seed``, ``--out``, and ``--config``. A config
file is a flat JSON object whose keys mirror the long flag names
(underscores for dashes); explicit command-line flags override it, and
environment variables are never consulted. Each run writes its fully
resolved configuration next to the results so any output can be
regenerated exactly.

Exit codes: 0 success with no quality flags, 1 success but quality flags
fired (boundary peak, unreliable exact value, non-identifiable fit), 2
errors (bad input, insufficient coverage, non-convergence, I/O).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .asymmetry import DegenerateMimicryError, mimicry_map
from .estimation import (
    NoiseModel,
    Spectrum,
    estimate_coherence,
    fit_spectrum,
    symmetric_grid,
    synth_spectrum,
)
from .figures import FIGURE_KEYS, FigureOptions, write_figure
from .model import FanoParams
from .spectrum_io import (
    read_spectrum_csv,
    write_columns_csv,
    write_json,
    write_spectrum_csv,
)

EXIT_OK = 0
EXIT_FLAGS = 1
EXIT_ERROR = 2

_PARAM_NAMES = ("q", "g", "scale", "baseline")


class CliError(Exception):
    """User-facing error: message printed to stderr, exit code 2."""


# ---------------------------------------------------------------------------
# configuration resolution
# ---------------------------------------------------------------------------

_DEFAULTS: dict[str, dict[str, Any]] = {
    "synth": {
        "seed": 0,
        "out": ".",
        "q": None,
        "g": None,
        "scale": 1.0,
        "baseline": 0.0,
        "grid_min": -12.0,
        "grid_max": 12.0,
        "grid_points": 2001,
        "noise": "none",
        "sigma": None,
        "counts_scale": None,
        "output_name": "spectrum.csv",
    },
    "analyze": {
        "seed": 0,
        "out": ".",
        "input": None,
        "n_boot": 200,
        "no_smooth": False,
        "smooth_window_frac": 0.05,
        "floor_frac": 1e-9,
        "rescale_factor": 3.7,
        "baseline_status": "absent",
    },
    "fit": {
        "seed": 0,
        "out": ".",
        "input": None,
        "freeze": [],
        "init": [],
        "max_nfev": 5000,
    },
    "figures": {
        "seed": 0,
        "out": ".",
        "which": list(FIGURE_KEYS),
        "q_list": "0,0.5,1.5,3",
    },
    "mimic": {
        "seed": 0,
        "out": ".",
        "q": None,
        "g": None,
        "window": 50.0,
        "points": 10001,
    },
}


def _load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError(f"config file {path} must hold a JSON object")
    return doc


def _resolve(command: str, args: argparse.Namespace) -> dict[str, Any]:
    """Merge builtin defaults <- config file <- explicit CLI flags."""
    cfg = dict(_DEFAULTS[command])
    if args.config is not None:
        doc = _load_config_file(args.config)
        unknown = set(doc) - set(cfg)
        if unknown:
            raise CliError(
                f"unknown config keys for {command}: {', '.join(sorted(unknown))}"
            )
        cfg.update(doc)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            cfg[key] = value
    if not 0 <= int(cfg["seed"]) < 2**64:
        raise CliError("seed must fit in an unsigned 64-bit integer")
    return cfg


def _outdir(cfg: dict[str, Any]) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit_config(command: str, cfg: dict[str, Any], out: Path) -> None:
    record = {"command": command, "version": __version__, **cfg}
    write_json(record, out / f"{command}_config.json")


def _require(cfg: dict[str, Any], *names: str) -> None:
    missing = [n for n in names if cfg[n] is None]
    if missing:
        raise CliError(f"missing required option(s): {', '.join('--' + n.replace('_', '-') for n in missing)}")


def _kv_items(items: Sequence[str] | dict, what: str) -> dict[str, float]:
    """Parse repeated name=value options (or accept a config-file mapping)."""
    if isinstance(items, dict):
        pairs = {str(k): v for k, v in items.items()}
    else:
        pairs = {}
        for item in items:
            name, sep, value = str(item).partition("=")
            if not sep:
                raise CliError(f"{what} expects name=value, got {item!r}")
            pairs[name.strip()] = value
    out = {}
    for name, value in pairs.items():
        if name not in _PARAM_NAMES:
            raise CliError(f"{what}: unknown parameter {name!r}; expected one of {_PARAM_NAMES}")
        try:
            out[name] = float(value)
        except (TypeError, ValueError) as exc:
            raise CliError(f"{what}: bad value for {name!r}: {value!r}") from exc
    return out


def _build_grid(cfg: dict[str, Any]) -> np.ndarray:
    lo, hi, n = float(cfg["grid_min"]), float(cfg["grid_max"]), int(cfg["grid_points"])
    if not (lo < hi and n >= 8):
        raise CliError("grid requires grid_min < grid_max and grid_points >= 8")
    # mirror-symmetric request: build by reflection so -eps is exactly on grid
    if lo == -hi and n % 2 == 1:
        return symmetric_grid(hi, (n - 1) // 2)
    return np.linspace(lo, hi, n)


def _noise_from(cfg: dict[str, Any]) -> NoiseModel:
    kind = str(cfg["noise"])
    seed = int(cfg["seed"])
    if kind == "none":
        return NoiseModel.none()
    if kind == "gaussian":
        _require(cfg, "sigma")
        return NoiseModel.gaussian(float(cfg["sigma"]), seed)
    if kind == "poisson":
        _require(cfg, "counts_scale")
        return NoiseModel.poisson(float(cfg["counts_scale"]), seed)
    raise CliError(f"unknown noise kind {kind!r} (expected none, gaussian, poisson)")


def _read_input(cfg: dict[str, Any]) -> Spectrum:
    _require(cfg, "input")
    try:
        return read_spectrum_csv(cfg["input"])
    except OSError as exc:
        raise CliError(f"cannot read {cfg['input']}: {exc}") from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _fmt(x: Optional[float]) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return "n/a"
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _resolve("synth", args)
    _require(cfg, "q", "g")
    out = _outdir(cfg)
    _emit_config("synth", cfg, out)
    params = FanoParams(float(cfg["q"]), float(cfg["g"]))
    spec = synth_spectrum(
        params,
        _build_grid(cfg),
        scale=float(cfg["scale"]),
        baseline=float(cfg["baseline"]),
        noise=_noise_from(cfg),
    )
    path = write_spectrum_csv(spec, out / str(cfg["output_name"]))
    write_json(spec.meta, out / "spectrum_meta.json")
    print(f"wrote {path} ({len(spec)} samples, q={params.q:g}, g={params.g:g})")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _resolve("analyze", args)
    out = _outdir(cfg)
    _emit_config("analyze", cfg, out)
    spec = _read_input(cfg)
    report = estimate_coherence(
        spec,
        n_boot=int(cfg["n_boot"]),
        seed=int(cfg["seed"]),
        smooth=not bool(cfg["no_smooth"]),
        smooth_window_frac=float(cfg["smooth_window_frac"]),
        floor_frac=float(cfg["floor_frac"]),
        rescale_factor=float(cfg["rescale_factor"]),
        baseline_status=str(cfg["baseline_status"]),
    )
    write_columns_csv(
        out / "asymmetry_curve.csv",
        ["epsilon", "asymmetry"],
        [report.curve.eps, report.curve.a],
    )
    doc = {
        "input": spec.meta,
        "bound": report.bound,
        "bound_std": report.bound_std,
        "bound_ci": list(report.bound_ci),
        "exact": None
        if report.exact is None
        else {
            "value": report.exact.exact,
            "method": report.exact.method,
            "residual": report.exact.residual,
            "closed_form": report.exact.closed_form,
            "std": report.exact_std,
            "ci": None if report.exact_ci is None else list(report.exact_ci),
        },
        "peak": {
            "eps0": report.peak.eps0,
            "a_max": report.peak.a_max,
            "curvature": report.peak.curvature,
            "boundary": report.peak.boundary,
            "refined": report.peak.refined,
        },
        "rescale": {
            "factor": report.rescale_factor,
            "bound": report.bound_rescaled,
            "matches": report.rescale_ok,
        },
        "bootstrap": {
            "n": report.n_boot,
            "failed": report.n_boot_failed,
            "seed": report.seed,
        },
        "flags": list(report.flags),
        "n_dropped": report.curve.n_dropped,
    }
    write_json(doc, out / "analyze_report.json")
    lines = [
        f"samples: {len(spec)}",
        f"peak: eps0={_fmt(report.peak.eps0)} a_max={_fmt(report.peak.a_max)}"
        + (" (boundary)" if report.peak.boundary else ""),
        f"coherence lower bound: {_fmt(report.bound)} +/- {_fmt(report.bound_std)}",
        f"coherence exact: {_fmt(report.exact.exact if report.exact else None)}"
        + (f" +/- {_fmt(report.exact_std)}" if report.exact is not None else ""),
        f"rescale check (x{_fmt(report.rescale_factor)}): bound {_fmt(report.bound_rescaled)}"
        + (" matches" if report.rescale_ok else " MISMATCH"),
        f"flags: {', '.join(report.flags) if report.flags else 'none'}",
    ]
    text = "\n".join(lines) + "\n"
    (out / "analyze_report.txt").write_text(text, encoding="ascii", newline="\n")
    print(text, end="")
    return EXIT_FLAGS if report.flags else EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = _resolve("fit", args)
    out = _outdir(cfg)
    _emit_config("fit", cfg, out)
    spec = _read_input(cfg)
    freeze = _kv_items(cfg["freeze"], "--freeze")
    init = _kv_items(cfg["init"], "--init")
    try:
        result = fit_spectrum(
            spec,
            freeze=freeze or None,
            init=init or None,
            max_nfev=int(cfg["max_nfev"]),
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    errors = {
        name: float(math.sqrt(result.covariance[i, i]))
        if result.covariance[i, i] >= 0.0
        else math.nan
        for i, name in enumerate(result.free_names)
    }
    doc = {
        "input": spec.meta,
        "params": result.values(),
        "errors": errors,
        "frozen": result.frozen,
        "free": list(result.free_names),
        "covariance": result.covariance,
        "rss": result.rss,
        "converged": result.converged,
        "non_identifiable": result.non_identifiable,
        "nfev": result.nfev,
        "message": result.message,
    }
    write_json(doc, out / "fit_report.json")
    vals = result.values()
    lines = [
        "fit: scale*I(eps; q, g) + baseline",
        *(
            f"  {name} = {_fmt(vals[name])}"
            + (f" +/- {_fmt(errors[name])}" if name in errors else " (frozen)")
            for name in _PARAM_NAMES
        ),
        f"rss: {result.rss:.6g}   converged: {result.converged}   nfev: {result.nfev}",
        f"non-identifiable: {result.non_identifiable}",
    ]
    if result.non_identifiable:
        lines.append(
            "note: with q, g, scale, baseline all free the model has an exact"
            " full-coherence alias; freeze q (or scale and baseline) to"
            " identify g"
        )
    text = "\n".join(lines) + "\n"
    (out / "fit_report.txt").write_text(text, encoding="ascii", newline="\n")
    print(text, end="")
    if not result.converged:
        print("fit did not converge", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_FLAGS if result.non_identifiable else EXIT_OK


def cmd_figures(args: argparse.Namespace) -> int:
    cfg = _resolve("figures", args)
    out = _outdir(cfg)
    which = list(cfg["which"])
    bad = [k for k in which if k not in FIGURE_KEYS]
    if bad:
        raise CliError(f"unknown figure key(s) {bad}; expected subset of {FIGURE_KEYS}")
    try:
        q_values = tuple(float(v) for v in str(cfg["q_list"]).split(",") if v.strip())
    except ValueError as exc:
        raise CliError(f"bad --q-list {cfg['q_list']!r}: {exc}") from exc
    if not q_values:
        raise CliError("--q-list must name at least one q value")
    opts = FigureOptions(visibility_q_values=q_values)
    cfg["resolved_options"] = opts.as_dict()
    _emit_config("figures", cfg, out)
    for key in which:
        for path in write_figure(key, out, opts):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_mimic(args: argparse.Namespace) -> int:
    cfg = _resolve("mimic", args)
    _require(cfg, "q", "g")
    out = _outdir(cfg)
    _emit_config("mimic", cfg, out)
    window = float(cfg["window"])
    points = int(cfg["points"])
    if not (window > 0.0 and points >= 8):
        raise CliError("mimic requires window > 0 and points >= 8")
    try:
        mm = mimicry_map(float(cfg["q"]), float(cfg["g"]))
    except DegenerateMimicryError as exc:
        raise CliError(str(exc)) from exc
    residual = mm.residual(window=(-window, window), n=points)
    doc = {
        "q": mm.q,
        "g": mm.g,
        "alpha": mm.alpha,
        "beta": mm.beta,
        "q_prime": mm.q_prime,
        "residual_max": residual,
        "residual_window": [-window, window],
        "residual_points": points,
    }
    write_json(doc, out / "mimic_report.json")
    text = (
        f"alias of (q={mm.q:g}, g={mm.g:g}) at full coherence:\n"
        f"  alpha   = {mm.alpha!r}\n"
        f"  beta    = {mm.beta!r}\n"
        f"  q_prime = {mm.q_prime!r}\n"
        f"max |alpha*(beta + I(eps)) - I'(eps)| over [{-window:g}, {window:g}]"
        f" ({points} pts): {residual:.3e}\n"
    )
    (out / "mimic_report.txt").write_text(text, encoding="ascii", newline="\n")
    print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (unsigned 64-bit)")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--config", default=None, help="JSON config file mirroring the flags")

    parser = argparse.ArgumentParser(
        prog="fanolab",
        description="Lineshape interferometry toolkit: synthesize, analyze, fit, plot.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic spectrum CSV")
    p.add_argument("--q", type=float, help="asymmetry parameter")
    p.add_argument("--g", type=float, help="first-order coherence in [0, 1]")
    p.add_argument("--scale", type=float, default=None, help="overall intensity scale (> 0)")
    p.add_argument("--baseline", type=float, default=None, help="additive offset (>= 0)")
    p.add_argument("--grid-min", type=float, default=None, help="smallest detuning")
    p.add_argument("--grid-max", type=float, default=None, help="largest detuning")
    p.add_argument("--grid-points", type=int, default=None, help="number of samples")
    p.add_argument("--noise", choices=("none", "gaussian", "poisson"), default=None)
    p.add_argument("--sigma", type=float, default=None, help="gaussian noise sigma")
    p.add_argument("--counts-scale", type=float, default=None, help="poisson counts per intensity unit")
    p.add_argument("--output-name", default=None, help="spectrum file name")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", parents=[common], help="estimate coherence from a spectrum file")
    p.add_argument("--input", help="spectrum CSV to analyze")
    p.add_argument("--n-boot", type=int, default=None, help="bootstrap replicates")
    p.add_argument("--no-smooth", action="store_true", default=None, help="disable pre-smoothing")
    p.add_argument("--smooth-window-frac", type=float, default=None, help="smoothing window as a fraction of the sample count")
    p.add_argument("--floor-frac", type=float, default=None, help="denominator floor relative to max intensity")
    p.add_argument("--rescale-factor", type=float, default=None, help="detuning rescale used for the bound invariance check")
    p.add_argument("--baseline-status", choices=("absent", "unknown"), default=None, help="declared knowledge about additive offsets")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fit", parents=[common], help="least-squares fit of scale*I(eps; q, g) + baseline")
    p.add_argument("--input", help="spectrum CSV to fit")
    p.add_argument("--freeze", action="append", default=None, metavar="NAME=VALUE", help="fix a parameter (repeatable)")
    p.add_argument("--init", action="append", default=None, metavar="NAME=VALUE", help="initial guess (repeatable; disables multi-start)")
    p.add_argument("--max-nfev", type=int, default=None, help="max model evaluations per start")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("figures", parents=[common], help="write standard figure CSVs and SVGs")
    p.add_argument("--which", nargs="+", choices=FIGURE_KEYS, default=None, help="figure keys (default: all)")
    p.add_argument("--q-list", default=None, help="comma-separated q values for the visibility figure")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("mimic", parents=[common], help="full-coherence alias of (q, g) with residual check")
    p.add_argument("--q", type=float, help="asymmetry parameter")
    p.add_argument("--g", type=float, help="first-order coherence in [0, 1]")
    p.add_argument("--window", type=float, default=None, help="half-width of the residual grid")
    p.add_argument("--points", type=int, default=None, help="residual grid size")
    p.set_defaults(func=cmd_mimic)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
