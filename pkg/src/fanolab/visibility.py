"""Fringe visibility for MZI and Fano interferometers.

Visibility is the textbook contrast V = (I_max - I_min)/(I_max + I_min).
For a MZI it relates to the coherence as V = chi*g with the balance factor
chi = 2*sqrt(I_A*I_B)/(I_A+I_B). For a Fano interferometer no such relation
holds: V(g) is non-monotonic (it can even vanish at partial coherence), so
V cannot be inverted for g. This module computes both so the failure can
be demonstrated and tabulated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .model import ChannelIntensities, FanoParams, fano_intensity, fano_stationary_points

__all__ = [
    "UndefinedVisibilityError",
    "VisibilityResult",
    "visibility",
    "balance_factor",
    "mzi_visibility",
    "fano_visibility",
    "visibility_vs_coherence_curve",
    "DEFAULT_WINDOW",
]

# Wide enough that the window endpoints sit within ~4e-4 (relative) of the
# eps -> inf level; configurable per call and recorded in results.
DEFAULT_WINDOW = (-50.0, 50.0)


class UndefinedVisibilityError(ValueError):
    """Raised when I_max + I_min = 0 and the contrast is undefined."""


def visibility(i_max: float, i_min: float) -> float:
    """Contrast (I_max - I_min)/(I_max + I_min) for extrema of an intensity pattern."""
    if i_min < 0.0 or i_max < i_min:
        raise ValueError(f"need i_max >= i_min >= 0, got i_max={i_max}, i_min={i_min}")
    if i_max + i_min == 0.0:
        raise UndefinedVisibilityError("both extrema are zero; visibility undefined")
    return (i_max - i_min) / (i_max + i_min)


def balance_factor(ci: ChannelIntensities) -> float:
    """Balance factor chi = 2*sqrt(I_A*I_B)/(I_A+I_B); equals 1 iff I_A = I_B."""
    i_a, i_b = ci
    if i_a < 0.0 or i_b < 0.0:
        raise ValueError("channel intensities must be nonnegative")
    if i_a + i_b == 0.0:
        raise UndefinedVisibilityError("both channel intensities are zero")
    return 2.0 * math.sqrt(i_a * i_b) / (i_a + i_b)


def mzi_visibility(ci: ChannelIntensities, g: float) -> float:
    """MZI fringe visibility chi*g; equals g for balanced channels."""
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"coherence g must lie in [0, 1], got {g}")
    return balance_factor(ci) * g


@dataclass(frozen=True)
class VisibilityResult:
    """Fano-interferometer visibility with the extrema that produced it.

    ``eps_max``/``eps_min`` are None when the corresponding extremum is the
    eps -> +/-inf level rather than a finite point; the *_at_infinity flags
    mark that case. The scan window is recorded for reproducibility.
    """

    v: float
    i_max: float
    i_min: float
    eps_max: Optional[float]
    eps_min: Optional[float]
    min_at_infinity: bool
    max_at_infinity: bool
    window: tuple[float, float]


def fano_visibility(params: FanoParams, window: tuple[float, float] = DEFAULT_WINDOW) -> VisibilityResult:
    """Visibility of the Fano lineshape over a detuning window.

    Extrema are taken over the analytic stationary points inside the window,
    the window endpoints, and the asymptotic level 1/(1+q^2). The asymptote
    counts as an attained extremum candidate so that V is well defined even
    when no finite minimum exists (e.g. g = 0).
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"window must be nonempty, got {window}")

    stat = fano_stationary_points(params)
    candidates: list[tuple[float, Optional[float]]] = [
        (p.intensity, p.eps) for p in stat.points if lo <= p.eps <= hi
    ]
    candidates.append((float(fano_intensity(lo, params)), lo))
    candidates.append((float(fano_intensity(hi, params)), hi))
    candidates.append((stat.asymptote, None))

    i_max, eps_max = max(candidates, key=lambda c: c[0])
    i_min, eps_min = min(candidates, key=lambda c: c[0])
    if i_max + i_min == 0.0:
        raise UndefinedVisibilityError("spectrum identically zero on window")
    v = (i_max - i_min) / (i_max + i_min)
    return VisibilityResult(
        v=v,
        i_max=i_max,
        i_min=i_min,
        eps_max=eps_max,
        eps_min=eps_min,
        min_at_infinity=eps_min is None,
        max_at_infinity=eps_max is None,
        window=(lo, hi),
    )


def visibility_vs_coherence_curve(
    q: float,
    g_grid: Sequence[float],
    window: tuple[float, float] = DEFAULT_WINDOW,
) -> list[tuple[float, float]]:
    """Tabulate (g, V) for a fixed Fano parameter across a coherence grid."""
    return [(float(g), fano_visibility(FanoParams(q, float(g)), window).v) for g in g_grid]
