"""Interferometer intensity models at arbitrary first-order coherence.

Two interferometer types are covered:

* Mach-Zehnder (MZI): two channels with phase-independent intensities
  I_A, I_B and a tunable relative phase phi,

      I(phi) = I_A + I_B + 2*g*sqrt(I_A*I_B)*cos(phi)

* Fano (FI): a broad continuum channel and a narrow resonant channel with
  amplitudes

      E_A = 1/(q - i),   E_B = 1/(eps + i)

  where eps is the dimensionless detuning and q the Fano parameter.
  Superposing the channels with coherence g in [0, 1] gives

      I(eps) = (eps^2 + q^2 + 2*q*eps*g + 2*(1-g)) / ((1+eps^2)*(1+q^2))

  which reduces to the textbook lineshape (eps+q)^2/((1+eps^2)*(1+q^2))
  at g = 1.

All functions are pure and accept scalars or numpy arrays for the detuning.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

__all__ = [
    "FanoParams",
    "ChannelAmplitudes",
    "ChannelIntensities",
    "StationaryPoint",
    "StationarySet",
    "detuning_from_energy",
    "channel_amplitudes",
    "channel_intensities",
    "relative_phase",
    "fano_intensity",
    "fano_intensity_ideal",
    "mzi_intensity",
    "fano_stationary_points",
]


@dataclass(frozen=True)
class FanoParams:
    """Lineshape parameters: Fano parameter q and coherence g in [0, 1]."""

    q: float
    g: float

    def __post_init__(self):
        if not (math.isfinite(self.q) and math.isfinite(self.g)):
            raise ValueError(f"parameters must be finite, got q={self.q}, g={self.g}")
        if not 0.0 <= self.g <= 1.0:
            raise ValueError(f"coherence g must lie in [0, 1], got {self.g}")


class ChannelAmplitudes(NamedTuple):
    e_a: complex  # continuum channel, 1/(q - i)
    e_b: complex  # resonant channel, 1/(eps + i)


class ChannelIntensities(NamedTuple):
    i_a: float
    i_b: float


def detuning_from_energy(energy: ArrayLike, center: float, linewidth: float) -> ArrayLike:
    """Convert a physical energy to the dimensionless detuning (E - E0)/(2*Gamma).

    ``linewidth`` is the resonance linewidth Gamma and must be positive.
    """
    if not (math.isfinite(center) and math.isfinite(linewidth)):
        raise ValueError("center and linewidth must be finite")
    if linewidth <= 0.0:
        raise ValueError(f"linewidth must be positive, got {linewidth}")
    return (np.asarray(energy, dtype=float) - center) / (2.0 * linewidth)


def channel_amplitudes(eps: float, q: float) -> ChannelAmplitudes:
    """Complex channel amplitudes (E_A, E_B) = (1/(q-i), 1/(eps+i))."""
    return ChannelAmplitudes(1.0 / complex(q, -1.0), 1.0 / complex(eps, 1.0))


def channel_intensities(eps: float, q: float) -> ChannelIntensities:
    """Individual channel intensities |E_A|^2 = 1/(1+q^2), |E_B|^2 = 1/(1+eps^2)."""
    return ChannelIntensities(1.0 / (1.0 + q * q), 1.0 / (1.0 + eps * eps))


def relative_phase(eps: float, q: float) -> float:
    """Relative phase arg(E_A* E_B) between the two channels, wrapped to (-pi, pi].

    The phase is pi at eps = -q (perfect destructive interference at full
    coherence) and is tuned continuously through the resonance via eps.
    """
    e_a, e_b = channel_amplitudes(eps, q)
    phi = float(np.angle(np.conj(e_a) * e_b))
    if phi <= -math.pi:
        phi += 2.0 * math.pi
    return phi


def fano_intensity(eps: ArrayLike, params: FanoParams) -> ArrayLike:
    """Fano interferogram at partial coherence.

    I(eps) = (eps^2 + q^2 + 2*q*eps*g + 2*(1-g)) / ((1+eps^2)*(1+q^2)),
    nonnegative for all eps whenever 0 <= g <= 1.
    """
    eps = np.asarray(eps, dtype=float)
    q, g = params.q, params.g
    num = eps * eps + q * q + 2.0 * q * eps * g + 2.0 * (1.0 - g)
    out = num / ((1.0 + eps * eps) * (1.0 + q * q))
    return out if out.ndim else float(out)


def fano_intensity_ideal(eps: ArrayLike, q: float) -> ArrayLike:
    """Fully coherent Fano lineshape (eps+q)^2 / ((1+eps^2)*(1+q^2)).

    Identical to ``fano_intensity`` with g = 1; zero at eps = -q and
    maximum 1 at eps = 1/q.
    """
    eps = np.asarray(eps, dtype=float)
    out = (eps + q) ** 2 / ((1.0 + eps * eps) * (1.0 + q * q))
    return out if out.ndim else float(out)


def mzi_intensity(phi: ArrayLike, ci: ChannelIntensities, g: float) -> ArrayLike:
    """MZI interference signal I_A + I_B + 2*g*sqrt(I_A*I_B)*cos(phi)."""
    i_a, i_b = ci
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"coherence g must lie in [0, 1], got {g}")
    if i_a < 0.0 or i_b < 0.0:
        raise ValueError("channel intensities must be nonnegative")
    phi = np.asarray(phi, dtype=float)
    out = i_a + i_b + 2.0 * g * math.sqrt(i_a * i_b) * np.cos(phi)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class StationaryPoint:
    eps: float
    intensity: float
    kind: str  # "max" or "min"


@dataclass(frozen=True)
class StationarySet:
    """Finite stationary points of the lineshape plus its eps -> +/-inf level.

    ``flat`` marks the degenerate q = 0, g = 1/2 case where the spectrum is
    constant and no finite extremum exists.
    """

    points: tuple[StationaryPoint, ...]
    asymptote: float
    flat: bool = False

    def intensity_candidates(self) -> list[float]:
        """Intensities of all stationary points plus the asymptotic level."""
        return [p.intensity for p in self.points] + [self.asymptote]


def fano_stationary_points(params: FanoParams) -> StationarySet:
    """Locate and classify the finite extrema of the partial-coherence lineshape.

    dI/deps = 0 reduces to the quadratic

        -q*g*eps^2 + (2*g - 1 - q^2)*eps + q*g = 0.

    For q*g != 0 it has two real roots of product -1 (one maximum, one
    minimum); at g = 1 these are eps = -q (intensity 0) and eps = 1/q
    (intensity 1). For q*g = 0 the quadratic degenerates to a linear
    equation with the single root eps = 0, except at q = 0, g = 1/2 where
    the spectrum is completely flat.
    """
    q, g = params.q, params.g
    asym = 1.0 / (1.0 + q * q)
    a = -q * g
    b = 2.0 * g - 1.0 - q * q

    if a != 0.0:
        # two real roots; stable quadratic formula (a*c = -(q*g)^2 < 0)
        disc = math.sqrt(b * b + 4.0 * (q * g) ** 2)
        t = -0.5 * (b + math.copysign(disc, b))
        r1, r2 = t / a, (q * g) / t
        lo, hi = min(r1, r2), max(r1, r2)
        # sign of dI/deps equals sign of the quadratic; for q*g > 0 the
        # parabola opens downward, so the smaller root is the minimum
        if q * g > 0.0:
            kinds = ("min", "max")
        else:
            kinds = ("max", "min")
        pts = tuple(
            StationaryPoint(e, float(fano_intensity(e, params)), k)
            for e, k in zip((lo, hi), kinds)
        )
        return StationarySet(pts, asym)

    if b != 0.0:
        # q = 0 (g != 1/2) or g = 0: single stationary point at eps = 0
        i0 = float(fano_intensity(0.0, params))
        kind = "max" if i0 > asym else "min"
        return StationarySet((StationaryPoint(0.0, i0, kind),), asym)

    # q = 0, g = 1/2: flat spectrum, I = 1 everywhere
    return StationarySet((), asym, flat=True)
