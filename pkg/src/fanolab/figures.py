"""Figure data products and their SVG rendering.

Five standard products, selected by key:

- ``1c``  two-path fringes ``1 + g cos(phi)`` for a balanced splitter at
          several coherences;
- ``1d``  lineshapes I(eps; q=-1.5, g) over the same coherence list, on an
          exactly mirror-symmetric detuning grid;
- ``1e``  visibility vs coherence for the two-path reference (a straight
          line) and for the resonant interferometer at several q;
- ``2``   asymmetry curves A(eps) at g=0.8 for |q| in {0.5, 3}, the peak
          locus traced over g, and the marked peak points;
- ``3``   the exact-inversion map g(eps0, A_max) as a grid plus analytic
          level curves.

Every product is a set of named CSV tables (authoritative) and one SVG
(convenience). Grid ranges and densities live in ``FigureOptions`` and are
recorded by the CLI in the resolved run config. Rendering pins the Agg
backend and a fixed SVG hash salt, and strips the date metadata, so
repeated runs emit byte-identical SVG text.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .asymmetry import asymmetry_closed_form, asymmetry_peak, invert_peak
from .estimation import symmetric_grid
from .model import ChannelIntensities, FanoParams, fano_intensity, mzi_intensity
from .spectrum_io import write_columns_csv
from .visibility import DEFAULT_WINDOW, fano_visibility, mzi_visibility

__all__ = [
    "FIGURE_KEYS",
    "FigureOptions",
    "FigureData",
    "figure_data",
    "render_figure",
    "write_figure",
    "SVG_HASH_SALT",
]

FIGURE_KEYS = ("1c", "1d", "1e", "2", "3")
SVG_HASH_SALT = "fanolab"


@dataclass(frozen=True)
class FigureOptions:
    """Grid choices for the figure products (defaults favor smooth curves)."""

    g_list: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    fringe_points: int = 721
    lineshape_q: float = -1.5
    lineshape_limit: float = 8.0
    lineshape_half_points: int = 4000
    visibility_q_values: tuple[float, ...] = (0.0, 0.5, 1.5, 3.0)
    visibility_g_points: int = 201
    visibility_window: tuple[float, float] = DEFAULT_WINDOW
    asymmetry_g: float = 0.8
    asymmetry_abs_q: tuple[float, ...] = (0.5, 3.0)
    asymmetry_limit: float = 8.0
    asymmetry_points: int = 1601
    asymmetry_locus_points: int = 401
    inversion_eps0_axis: tuple[float, float, int] = (0.05, 6.0, 120)
    inversion_amax_axis: tuple[float, float, int] = (0.02, 0.98, 97)
    inversion_levels: tuple[float, ...] = (0.2, 0.4, 0.6, 0.8, 0.95)
    inversion_contour_points: int = 400

    def as_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


@dataclass(frozen=True)
class FigureData:
    """Named tables of one figure product; "data" is the primary table."""

    key: str
    tables: dict[str, tuple[list[str], list[np.ndarray]]]


def _g_label(g: float) -> str:
    return f"g={g:g}"


def _fringes_data(opts: FigureOptions) -> FigureData:
    phi = np.linspace(0.0, 2.0 * math.pi, opts.fringe_points)
    balanced = ChannelIntensities(0.5, 0.5)
    headers = ["phi"] + [_g_label(g) for g in opts.g_list]
    cols = [phi] + [mzi_intensity(phi, balanced, g) for g in opts.g_list]
    return FigureData("1c", {"data": (headers, cols)})


def _lineshapes_data(opts: FigureOptions) -> FigureData:
    grid = symmetric_grid(opts.lineshape_limit, opts.lineshape_half_points)
    headers = ["epsilon"] + [_g_label(g) for g in opts.g_list]
    cols = [grid] + [
        fano_intensity(grid, FanoParams(opts.lineshape_q, g)) for g in opts.g_list
    ]
    return FigureData("1d", {"data": (headers, cols)})


def _visibility_data(opts: FigureOptions) -> FigureData:
    g_grid = np.linspace(0.0, 1.0, opts.visibility_g_points)
    balanced = ChannelIntensities(0.5, 0.5)
    headers = ["g", "V_mzi"] + [f"V_q={q:g}" for q in opts.visibility_q_values]
    cols = [g_grid, np.array([mzi_visibility(balanced, g) for g in g_grid])]
    for q in opts.visibility_q_values:
        cols.append(
            np.array(
                [
                    fano_visibility(FanoParams(q, g), opts.visibility_window).v
                    for g in g_grid
                ]
            )
        )
    return FigureData("1e", {"data": (headers, cols)})


def _asymmetry_data(opts: FigureOptions) -> FigureData:
    g = opts.asymmetry_g
    eps = np.linspace(0.0, opts.asymmetry_limit, opts.asymmetry_points)
    headers = ["epsilon"] + [f"A_q={q:g}" for q in opts.asymmetry_abs_q]
    cols = [eps] + [
        asymmetry_closed_form(eps, FanoParams(q, g)) for q in opts.asymmetry_abs_q
    ]

    g_grid = np.linspace(0.0, 1.0, opts.asymmetry_locus_points)
    locus_headers, locus_cols = ["g"], [g_grid]
    for q in opts.asymmetry_abs_q:
        peaks = [asymmetry_peak(FanoParams(q, gi)) for gi in g_grid]
        locus_headers += [f"eps0_q={q:g}", f"amax_q={q:g}"]
        locus_cols += [
            np.array([p.eps0 for p in peaks]),
            np.array([p.a_max for p in peaks]),
        ]

    pts = [asymmetry_peak(FanoParams(q, g)) for q in opts.asymmetry_abs_q]
    points = (
        ["q", "g", "eps0", "amax"],
        [
            np.array(opts.asymmetry_abs_q, dtype=float),
            np.full(len(pts), g),
            np.array([p.eps0 for p in pts]),
            np.array([p.a_max for p in pts]),
        ],
    )
    return FigureData(
        "2",
        {
            "data": (headers, cols),
            "locus": (locus_headers, locus_cols),
            "points": points,
        },
    )


def _inversion_contour(level: float, eps0_max: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Level curve of the inversion map: fixed g traced over eps0.

    At fixed g the admissible peaks satisfy eps0^2 = 2(1-g) + q^2, so the
    level curve is A = g*sqrt(eps0^2 - 2(1-g))/eps0 for eps0 above the
    q -> 0 threshold.
    """
    eps0_min = math.sqrt(2.0 * (1.0 - level))
    lo = max(eps0_min, 1e-9)
    eps0 = np.linspace(lo, eps0_max, n)
    amax = level * np.sqrt(np.maximum(eps0**2 - eps0_min**2, 0.0)) / eps0
    return eps0, amax


def _inversion_data(opts: FigureOptions) -> FigureData:
    e_lo, e_hi, e_n = opts.inversion_eps0_axis
    a_lo, a_hi, a_n = opts.inversion_amax_axis
    eps0_axis = np.linspace(e_lo, e_hi, int(e_n))
    amax_axis = np.linspace(a_lo, a_hi, int(a_n))
    gg = np.empty((int(e_n) * int(a_n),))
    ee = np.empty_like(gg)
    aa = np.empty_like(gg)
    k = 0
    for e0 in eps0_axis:
        for a in amax_axis:
            ee[k] = e0
            aa[k] = a
            gg[k] = invert_peak(float(e0), float(a)).exact
            k += 1
    grid = (["eps0", "amax", "g"], [ee, aa, gg])

    lv, le, la = [], [], []
    for level in opts.inversion_levels:
        e0s, ams = _inversion_contour(level, e_hi, opts.inversion_contour_points)
        lv.append(np.full(len(e0s), level))
        le.append(e0s)
        la.append(ams)
    contours = (
        ["level", "eps0", "amax"],
        [np.concatenate(lv), np.concatenate(le), np.concatenate(la)],
    )

    g_mark = 0.8
    marks = [asymmetry_peak(FanoParams(q, g_mark)) for q in (0.5, 3.0)]
    points = (
        ["g", "eps0", "amax"],
        [
            np.full(len(marks), g_mark),
            np.array([p.eps0 for p in marks]),
            np.array([p.a_max for p in marks]),
        ],
    )
    return FigureData("3", {"data": grid, "contours": contours, "points": points})


_BUILDERS = {
    "1c": _fringes_data,
    "1d": _lineshapes_data,
    "1e": _visibility_data,
    "2": _asymmetry_data,
    "3": _inversion_data,
}


def figure_data(key: str, opts: FigureOptions = FigureOptions()) -> FigureData:
    """Compute the tables of one figure product."""
    if key not in _BUILDERS:
        raise ValueError(f"unknown figure key {key!r}; expected one of {FIGURE_KEYS}")
    return _BUILDERS[key](opts)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _plt():
    """Import pyplot pinned to the Agg backend with deterministic SVG output."""
    import matplotlib

    matplotlib.use("Agg", force=True)
    matplotlib.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def _render_lines(data: FigureData, xlabel: str, ylabel: str, title: str, path: Path) -> None:
    plt = _plt()
    headers, cols = data.tables["data"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name, col in zip(headers[1:], cols[1:]):
        ax.plot(cols[0], col, label=name, linewidth=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def _render_asymmetry(data: FigureData, path: Path) -> None:
    plt = _plt()
    headers, cols = data.tables["data"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name, col in zip(headers[1:], cols[1:]):
        ax.plot(cols[0], col, label=name, linewidth=1.2)
    lh, lc = data.tables["locus"]
    for j in range(1, len(lh), 2):
        ax.plot(lc[j], lc[j + 1], linestyle="--", linewidth=0.9, color="0.4")
    ph, pc = data.tables["points"]
    ax.plot(pc[2], pc[3], "o", color="black", markersize=5, label="peaks, g=0.8")
    ax.set_xlabel("detuning")
    ax.set_ylabel("asymmetry")
    ax.set_title("Asymmetry curves, peak locus (dashed), and peaks")
    ax.set_xlim(0.0, float(cols[0][-1]))
    ax.set_ylim(0.0, 1.0)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def _render_inversion(data: FigureData, opts: FigureOptions, path: Path) -> None:
    plt = _plt()
    e_lo, e_hi, e_n = opts.inversion_eps0_axis
    a_lo, a_hi, a_n = opts.inversion_amax_axis
    _, (ee, aa, gg) = data.tables["data"]
    img = gg.reshape(int(e_n), int(a_n)).T  # rows = amax, cols = eps0
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    im = ax.imshow(
        img,
        origin="lower",
        extent=(e_lo, e_hi, a_lo, a_hi),
        aspect="auto",
        vmin=0.0,
        vmax=1.0,
        cmap="viridis",
    )
    fig.colorbar(im, ax=ax, label="coherence")
    ch, cc = data.tables["contours"]
    levels, eps0s, amaxs = cc
    for level in np.unique(levels):
        sel = levels == level
        style = "--" if abs(level - 0.8) < 1e-12 else "-"
        ax.plot(eps0s[sel], amaxs[sel], style, color="white", linewidth=0.9)
    ph, pc = data.tables["points"]
    ax.plot(pc[1], pc[2], "o", color="black", markersize=5)
    ax.set_xlabel("peak position")
    ax.set_ylabel("peak asymmetry")
    ax.set_title("Coherence from the asymmetry peak (levels, g=0.8 dashed)")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def render_figure(key: str, data: FigureData, path: Union[str, Path], opts: FigureOptions = FigureOptions()) -> Path:
    """Render one figure product to SVG."""
    path = Path(path)
    if key == "1c":
        _render_lines(data, "phase (rad)", "intensity", "Two-path fringes vs coherence", path)
    elif key == "1d":
        _render_lines(
            data, "detuning", "intensity",
            f"Lineshapes at q={opts.lineshape_q:g} vs coherence", path,
        )
    elif key == "1e":
        _render_lines(data, "coherence", "visibility", "Visibility vs coherence", path)
    elif key == "2":
        _render_asymmetry(data, path)
    elif key == "3":
        _render_inversion(data, opts, path)
    else:
        raise ValueError(f"unknown figure key {key!r}")
    return path


def write_figure(
    key: str,
    outdir: Union[str, Path],
    opts: FigureOptions = FigureOptions(),
    *,
    csv: bool = True,
    svg: bool = True,
) -> list[Path]:
    """Write the CSV tables and SVG of one figure product; returns the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    data = figure_data(key, opts)
    written: list[Path] = []
    if csv:
        for name, (headers, cols) in data.tables.items():
            suffix = "" if name == "data" else f"_{name}"
            written.append(
                write_columns_csv(outdir / f"fig{key}{suffix}.csv", headers, cols)
            )
    if svg:
        written.append(render_figure(key, data, outdir / f"fig{key}.svg", opts))
    return written
