"""Spectral asymmetry and coherence extraction for Fano interferometers.

The asymmetry parameter of a spectrum I(eps),

    A(eps) = |I(eps) - I(-eps)| / (I(eps) + I(-eps)),

is the ratio of the antisymmetric to the symmetric part and lies in [0, 1].
For the partial-coherence Fano lineshape it has the closed form

    A(eps) = 2*|q|*eps*g / (2*(1-g) + eps^2 + q^2),    eps >= 0,

with a unique maximum at

    eps0  = sqrt(2*(1-g) + q^2),
    A_max = |q|*g / sqrt(2*(1-g) + q^2).

A_max <= g always, so the peak height is a direct lower bound on the
coherence; combining the peak position and height recovers g exactly.
Eliminating q turns the inversion into the real cubic

    2*g^3 + (eps0^2 - 2)*g^2 - A_max^2*eps0^2 = 0,

which has exactly one root in (0, 1] for any consistent peak. The cubic is
solved with a bracketed root finder; the equivalent Cardano expression is
evaluated as a cross-check wherever its inner square root is real (for
three real roots the cube root turns complex and the expression is left
alone rather than guessing a branch).

A scaled-and-offset copy of any partial-coherence spectrum is exactly a
fully coherent one:  alpha*[beta + I(eps, q, g)] = I(eps, q', 1).  The
coefficients follow from matching numerator polynomials and make
(q, g, scale, baseline) jointly non-identifiable from a single spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

from .model import FanoParams, fano_intensity

ArrayLike = Union[float, np.ndarray]

__all__ = [
    "AsymmetryPeak",
    "CoherenceEstimate",
    "MimicryMap",
    "InconsistentPeakError",
    "DegenerateMimicryError",
    "asymmetry_closed_form",
    "asymmetry_of_function",
    "asymmetry_peak",
    "coherence_lower_bound",
    "coherence_exact",
    "invert_peak",
    "inversion_cubic",
    "coherence_closed_form",
    "mimicry_map",
]


class InconsistentPeakError(ValueError):
    """The supplied (eps0, A_max) cannot come from an exact Fano spectrum."""


class DegenerateMimicryError(ValueError):
    """No fully coherent alias exists (flat spectrum at q = 0, g = 1/2)."""


def asymmetry_closed_form(eps: ArrayLike, params: FanoParams) -> ArrayLike:
    """Asymmetry of the Fano lineshape, 2*|q|*|eps|*g / (2*(1-g) + eps^2 + q^2).

    A is even in eps, so negative detunings are mapped to |eps|.
    """
    eps = np.abs(np.asarray(eps, dtype=float))
    q, g = params.q, params.g
    out = 2.0 * abs(q) * eps * g / (2.0 * (1.0 - g) + eps * eps + q * q)
    return out if out.ndim else float(out)


def asymmetry_of_function(intensity: Callable[[ArrayLike], ArrayLike], eps: ArrayLike) -> ArrayLike:
    """Definitional asymmetry |I(eps)-I(-eps)|/(I(eps)+I(-eps)) of any spectrum.

    Points where the denominator vanishes are undefined and returned as NaN.
    """
    eps = np.asarray(eps, dtype=float)
    ip = np.asarray(intensity(eps), dtype=float)
    im = np.asarray(intensity(-eps), dtype=float)
    den = ip + im
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0.0, np.abs(ip - im) / den, np.nan)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class AsymmetryPeak:
    """Position and value of the asymmetry maximum.

    ``degenerate`` marks q = 0 or g = 0, where A vanishes identically and
    the returned zero-peak carries no coherence information.
    """

    eps0: float
    a_max: float
    degenerate: bool = False


def asymmetry_peak(params: FanoParams) -> AsymmetryPeak:
    """Analytic peak (eps0, A_max) of the asymmetry parameter."""
    q, g = params.q, params.g
    if q == 0.0 or g == 0.0:
        return AsymmetryPeak(0.0, 0.0, degenerate=True)
    eps0 = math.sqrt(2.0 * (1.0 - g) + q * q)
    return AsymmetryPeak(eps0, abs(q) * g / eps0)


def coherence_lower_bound(peak: AsymmetryPeak) -> float:
    """Certified lower bound on g for an exact Fano spectrum: the peak height.

    A_max <= g holds with equality only at g = 1; a degenerate zero-peak
    yields the vacuous bound 0. Adding a positive baseline to a spectrum
    lowers A everywhere, so the bound survives baseline contamination.
    """
    return peak.a_max


def inversion_cubic(eps0: float, a_max: float) -> tuple[float, float, float, float]:
    """Coefficients (c3, c2, c1, c0) of the inversion cubic in g."""
    return 2.0, eps0 * eps0 - 2.0, 0.0, -(a_max * a_max) * eps0 * eps0


def coherence_closed_form(eps0: float, a_max: float) -> float:
    """Direct Cardano-style evaluation of g(eps0, A_max).

    g = (2 - eps0^2 + (eps0^2-2)^2/R + R) / 6 with
    R = cbrt(54*A^2*e^2 - (e^2-2)^3 + 6*sqrt(3)*sqrt(27*A^4*e^4 - A^2*e^2*(e^2-2)^3)).

    Returns NaN when the inner radicand is negative (three-real-root case,
    where the expression requires a complex cube-root branch choice).
    """
    e2 = eps0 * eps0
    a2 = a_max * a_max
    rad = 27.0 * a2 * a2 * e2 * e2 - a2 * e2 * (e2 - 2.0) ** 3
    if rad < 0.0:
        return math.nan
    inner = 54.0 * a2 * e2 - (e2 - 2.0) ** 3 + 6.0 * math.sqrt(3.0) * math.sqrt(rad)
    r = np.cbrt(inner)
    if r == 0.0:
        # inner = 0 requires A = 0 and eps0^2 = 2; degenerate zero-asymmetry
        return math.nan
    return (2.0 - e2 + (e2 - 2.0) ** 2 / r + r) / 6.0


@dataclass(frozen=True)
class CoherenceEstimate:
    """Coherence reconstructed from an asymmetry peak.

    ``lower_bound`` is the certified bound A_max; ``exact`` the unique root
    of the inversion cubic in (0, 1]; ``residual`` the cubic evaluated at
    the returned root. ``closed_form`` carries the direct Cardano value on
    its real-valued domain (NaN otherwise) as a diagnostic cross-check.
    """

    lower_bound: float
    exact: Optional[float]
    method: str  # "analytic" | "cubic-numeric" | "closed-form-cardano"
    residual: float
    closed_form: float = math.nan


# a_max marginally above 1 is treated as the exact g = 1 boundary; beyond
# this the peak cannot come from any Fano spectrum
_BOUNDARY_SLACK = 1e-9


def invert_peak(eps0: float, a_max: float) -> CoherenceEstimate:
    """Reconstruct g from a peak given as raw floats; see ``coherence_exact``."""
    if not (math.isfinite(eps0) and math.isfinite(a_max)):
        raise InconsistentPeakError(f"non-finite peak ({eps0}, {a_max})")
    if eps0 <= 0.0 or a_max <= 0.0:
        raise InconsistentPeakError(
            f"degenerate peak (eps0={eps0}, a_max={a_max}): coherence unidentifiable"
        )
    if a_max > 1.0 + _BOUNDARY_SLACK:
        raise InconsistentPeakError(f"a_max={a_max} exceeds 1: not a Fano asymmetry peak")

    cf = coherence_closed_form(eps0, min(a_max, 1.0))
    if a_max >= 1.0 - 1e-15:
        # boundary: A_max -> g at g = 1
        return CoherenceEstimate(min(a_max, 1.0), 1.0, "analytic", 0.0, cf)

    c3, c2, _, c0 = inversion_cubic(eps0, a_max)
    cubic = lambda x: ((c3 * x + c2) * x) * x + c0
    # cubic(0) = -A^2*eps0^2 < 0 and cubic(1) = eps0^2*(1 - A^2) > 0
    root = brentq(cubic, 0.0, 1.0, xtol=1e-15, rtol=8.882e-16)
    return CoherenceEstimate(a_max, float(root), "cubic-numeric", float(cubic(root)), cf)


def coherence_exact(peak: AsymmetryPeak) -> CoherenceEstimate:
    """Exact coherence from an asymmetry peak via the inversion cubic.

    The unique root in (0, 1] exists for every consistent peak
    (0 < A_max <= 1, eps0 > 0); anything else raises
    ``InconsistentPeakError``. Note the reconstruction assumes a
    baseline-free spectrum: a baseline leaves A_max a valid lower bound
    but silently moves the exact value (see ``mimicry_map``).
    """
    if getattr(peak, "degenerate", False):
        raise InconsistentPeakError("degenerate zero-asymmetry peak: coherence unidentifiable")
    return invert_peak(peak.eps0, peak.a_max)


@dataclass(frozen=True)
class MimicryMap:
    """Coefficients of the exact full-coherence alias of a lineshape.

    alpha*[beta + I(eps, q, g)] = I(eps, q_prime, 1) pointwise in eps.
    alpha and beta depend only on (q, g); beta <= 0 for g < 1 (the partial
    coherence raises the spectral floor, so mimicking full coherence means
    removing an offset), and alpha < 0 can occur only on the measure-zero
    set q*g = 0.
    """

    q: float
    g: float
    alpha: float
    beta: float
    q_prime: float

    def alias_params(self, scale: float = 1.0, baseline: float = 0.0) -> tuple[float, float, float, float]:
        """Map (q, g, scale, baseline) to its exact alias (q', 1, scale', baseline').

        scale*I(eps, q, g) + baseline = scale'*I(eps, q', 1) + baseline'.
        """
        return self.q_prime, 1.0, scale / self.alpha, baseline - scale * self.beta

    def residual(self, window: tuple[float, float] = (-50.0, 50.0), n: int = 10001) -> float:
        """Max-norm of the identity on a dense grid; the validation oracle."""
        eps = np.linspace(window[0], window[1], n)
        lhs = self.alpha * (self.beta + fano_intensity(eps, FanoParams(self.q, self.g)))
        rhs = fano_intensity(eps, FanoParams(self.q_prime, 1.0))
        return float(np.max(np.abs(lhs - rhs)))


def mimicry_map(q: float, g: float) -> MimicryMap:
    """Construct the full-coherence alias coefficients for a lineshape (q, g).

    Matching the numerator polynomials of the two rational functions gives
    a quadratic for B = 1 + beta*(1+q^2),

        B^2 + (q^2 + 1 - 2*g)*B - q^2*g^2 = 0,

    whose positive root yields alpha = (1+q^2)/sqrt(m^2 + 4*q^2*g^2) > 0
    and q' = q*g/B. For q*g = 0 the positive root collapses to 0 and the
    other root B = -(q^2+1-2*g) carries the (even, q' = 0) alias instead;
    at q = 0, g = 1/2 both roots vanish and no alias exists.
    """
    params = FanoParams(q, g)  # validate
    q, g = params.q, params.g
    m = q * q + 1.0 - 2.0 * g
    one_q2 = 1.0 + q * q
    if q * g != 0.0:
        s = math.sqrt(m * m + 4.0 * (q * g) ** 2)
        b_aux = 0.5 * (s - m)
        alpha = one_q2 / s
        q_prime = q * g / b_aux
    else:
        if m == 0.0:
            raise DegenerateMimicryError(
                "q = 0, g = 1/2 yields a flat spectrum with no full-coherence alias"
            )
        b_aux = -m
        alpha = -one_q2 / m
        q_prime = 0.0
    beta = (b_aux - 1.0) / one_q2
    return MimicryMap(q, g, alpha, beta, q_prime)
