"""Noisy-spectrum pipeline: synthesis, empirical asymmetry, coherence
estimation with bootstrap uncertainty, model fitting, and multi-q pooling.

The estimation chain mirrors what an experiment would do with a sampled
spectrum I(eps_i):

1. resample the spectrum symmetrically about eps = 0 (monotone
   piecewise-cubic interpolation, which cannot overshoot and fake
   asymmetry) and form A(eps) = |I(eps)-I(-eps)|/(I(eps)+I(-eps));
2. locate the discrete maximum of A and refine it with a local parabola;
3. read off the coherence lower bound (the peak height) and, for
   baseline-free spectra, the exact value via the inversion cubic.

Uncertainties come from a seeded nonparametric bootstrap: the spectrum is
split into a smooth reference plus residuals, residuals are resampled with
replacement, and the full chain is re-run per replicate. Per-replicate RNG
streams are spawned from ``numpy.random.SeedSequence(seed)`` so results
are reproducible and independent of any replicate scheduling.

Model fitting uses scale*I(eps; q, g) + baseline. With all four parameters
free the problem is exactly degenerate (any spectrum has a full-coherence
alias, see ``fanolab.asymmetry.mimicry_map``), so such fits carry a
non-identifiable flag; freezing q (or the scale/baseline pair) restores
identifiability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import least_squares
from scipy.signal import savgol_filter

from .asymmetry import CoherenceEstimate, InconsistentPeakError, invert_peak
from .model import FanoParams, fano_intensity

__all__ = [
    "Spectrum",
    "NoiseModel",
    "AsymmetryCurve",
    "RefinedPeak",
    "CoherenceReport",
    "FitResult",
    "QEstimate",
    "PooledEstimate",
    "InsufficientCoverageError",
    "symmetric_grid",
    "synth_spectrum",
    "empirical_asymmetry",
    "find_asymmetry_peak",
    "estimate_coherence",
    "fit_spectrum",
    "combine_multi_q",
]

MIN_SAMPLES = 8


class InsufficientCoverageError(ValueError):
    """Spectrum does not cover a symmetric detuning range about eps = 0."""


@dataclass(frozen=True)
class Spectrum:
    """Sampled intensity vs. dimensionless detuning, with provenance metadata.

    Detunings must be strictly increasing, intensities nonnegative, and at
    least ``MIN_SAMPLES`` points are required for any analysis. ``meta``
    records where the samples came from (synthesis parameters and RNG seed,
    or source file and checksum).
    """

    epsilon: np.ndarray
    intensity: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        eps = np.asarray(self.epsilon, dtype=float)
        inten = np.asarray(self.intensity, dtype=float)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "intensity", inten)
        if eps.ndim != 1 or inten.shape != eps.shape:
            raise ValueError("epsilon and intensity must be 1-d arrays of equal length")
        if len(eps) < MIN_SAMPLES:
            raise ValueError(f"need at least {MIN_SAMPLES} samples, got {len(eps)}")
        if not np.all(np.isfinite(eps)) or not np.all(np.isfinite(inten)):
            raise ValueError("samples must be finite")
        if np.any(np.diff(eps) <= 0.0):
            raise ValueError("detunings must be strictly increasing")
        if np.any(inten < 0.0):
            raise ValueError("intensities must be nonnegative")

    def __len__(self) -> int:
        return len(self.epsilon)


@dataclass(frozen=True)
class NoiseModel:
    """Seeded noise for synthetic spectra: none, additive Gaussian, or Poisson.

    The same seed always reproduces the same spectrum bit for bit.
    ``counts_scale`` converts intensity to expected counts for the Poisson
    model; the noisy intensity is counts/counts_scale.
    """

    kind: str = "none"  # "none" | "gaussian" | "poisson"
    sigma: float = 0.0
    counts_scale: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "poisson"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and not self.sigma > 0.0:
            raise ValueError("gaussian noise requires sigma > 0")
        if self.kind == "poisson" and not self.counts_scale > 0.0:
            raise ValueError("poisson noise requires counts_scale > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls("none")

    @classmethod
    def gaussian(cls, sigma: float, seed: int = 0) -> "NoiseModel":
        return cls("gaussian", sigma=sigma, seed=seed)

    @classmethod
    def poisson(cls, counts_scale: float, seed: int = 0) -> "NoiseModel":
        return cls("poisson", counts_scale=counts_scale, seed=seed)

    def apply(self, clean: np.ndarray) -> tuple[np.ndarray, int]:
        """Return (noisy values clamped at 0, number of clamped points)."""
        if self.kind == "none":
            return np.array(clean, dtype=float), 0
        rng = np.random.default_rng(self.seed)
        if self.kind == "gaussian":
            noisy = clean + rng.normal(0.0, self.sigma, size=clean.shape)
        else:
            noisy = rng.poisson(self.counts_scale * clean).astype(float) / self.counts_scale
        clamped = int(np.count_nonzero(noisy < 0.0))
        return np.maximum(noisy, 0.0), clamped

    def describe(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "seed": int(self.seed)}
        if self.kind == "gaussian":
            d["sigma"] = self.sigma
        elif self.kind == "poisson":
            d["counts_scale"] = self.counts_scale
        return d


def symmetric_grid(limit: float, n_half: int) -> np.ndarray:
    """Detuning grid [-limit, limit] with 2*n_half+1 points, exactly mirror-symmetric.

    Built by reflecting the nonnegative half so that -eps is on the grid
    whenever eps is, which keeps the empirical asymmetry of even spectra at
    exactly zero instead of interpolation-noise level.
    """
    if limit <= 0.0 or n_half < 1:
        raise ValueError("need limit > 0 and n_half >= 1")
    half = np.linspace(0.0, limit, n_half + 1)
    return np.concatenate([-half[:0:-1], half])


def synth_spectrum(
    params: FanoParams,
    grid: np.ndarray,
    *,
    scale: float = 1.0,
    baseline: float = 0.0,
    noise: Optional[NoiseModel] = None,
) -> Spectrum:
    """Synthesize scale*I(eps; q, g) + baseline on a grid, optionally with noise.

    Negative noisy values are clamped to zero; the clamp count is recorded
    in the metadata together with all generation parameters.
    """
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    if baseline < 0.0:
        raise ValueError("baseline must be nonnegative")
    noise = noise or NoiseModel.none()
    grid = np.asarray(grid, dtype=float)
    clean = scale * fano_intensity(grid, params) + baseline
    noisy, clamped = noise.apply(clean)
    meta = {
        "kind": "synthetic",
        "q": params.q,
        "g": params.g,
        "scale": scale,
        "baseline": baseline,
        "noise": noise.describe(),
        "clamped": clamped,
    }
    return Spectrum(grid, noisy, meta)


@dataclass(frozen=True)
class AsymmetryCurve:
    """Empirical asymmetry sampled on the nonnegative half-grid.

    ``n_dropped`` counts points excluded by the denominator floor (the
    symmetric part can vanish, e.g. near the g = 1 destructive zero);
    ``eps_lim`` is the largest detuning with symmetric coverage.
    """

    eps: np.ndarray
    a: np.ndarray
    eps_lim: float
    n_dropped: int = 0


def empirical_asymmetry(spec: Spectrum, floor_frac: float = 1e-9) -> AsymmetryCurve:
    """Asymmetry curve of a sampled spectrum via symmetric resampling.

    The spectrum is interpolated with a monotone piecewise cubic (no
    overshoot, so symmetric data cannot acquire spurious asymmetry) and
    evaluated at +/-eps for every nonnegative grid point within the
    symmetric coverage. Points where I(eps)+I(-eps) falls below
    ``floor_frac * max(I)`` are dropped and counted.
    """
    eps, inten = spec.epsilon, spec.intensity
    eps_lim = min(-eps[0], eps[-1])
    if not eps_lim > 0.0:
        raise InsufficientCoverageError(
            f"spectrum spans [{eps[0]}, {eps[-1]}]; no symmetric range about 0"
        )
    interp = PchipInterpolator(eps, inten, extrapolate=False)
    g_pos = eps[(eps >= 0.0) & (eps <= eps_lim)]
    if len(g_pos) < 3:
        raise InsufficientCoverageError("fewer than 3 nonnegative points with symmetric coverage")
    ip = interp(g_pos)
    im = interp(-g_pos)
    den = ip + im
    floor = floor_frac * float(np.max(inten))
    keep = den >= floor
    n_dropped = int(np.count_nonzero(~keep))
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.abs(ip[keep] - im[keep]) / den[keep]
    return AsymmetryCurve(g_pos[keep], a, float(eps_lim), n_dropped)


@dataclass(frozen=True)
class RefinedPeak:
    """Asymmetry-curve maximum with sub-sample refinement diagnostics.

    ``boundary`` is set when the discrete argmax sits on the grid edge (the
    true peak likely lies outside the window; the values are untrustworthy).
    ``refined`` is False when the local quadratic was not concave and the
    raw grid maximum was returned instead. ``curvature`` is the second
    derivative of the fitted parabola.
    """

    eps0: float
    a_max: float
    curvature: float
    boundary: bool
    refined: bool
    index: int
    degenerate: bool = False


def find_asymmetry_peak(curve: Union[AsymmetryCurve, tuple], n_fit: int = 3) -> RefinedPeak:
    """Locate the asymmetry maximum and refine it with a local parabola.

    Fits a quadratic through ``n_fit`` (3-5) points around the discrete
    argmax and returns the vertex, clamped to the fit window. Boundary
    peaks are returned unrefined with the boundary flag set.
    """
    if isinstance(curve, AsymmetryCurve):
        eps, a = curve.eps, curve.a
    else:
        eps, a = (np.asarray(v, dtype=float) for v in curve)
    n = len(eps)
    if n < 3:
        raise ValueError("need at least 3 asymmetry points")
    if not 3 <= n_fit <= 5:
        raise ValueError("n_fit must be 3, 4, or 5")

    idx = int(np.argmax(a))
    if idx == 0 or idx == n - 1:
        return RefinedPeak(float(eps[idx]), float(a[idx]), math.nan, True, False, idx)

    half = (n_fit - 1) // 2
    lo = max(idx - half, 0)
    hi = min(idx + half + 1, n)
    if hi - lo < 3:  # pragma: no cover - idx is interior, so >= 3 points exist
        lo, hi = idx - 1, idx + 2
    x = eps[lo:hi] - eps[idx]
    c2, c1, c0 = np.polyfit(x, a[lo:hi], 2)
    if c2 >= 0.0:
        # not locally concave (flat or noise-dominated); keep the grid value
        return RefinedPeak(float(eps[idx]), float(a[idx]), 2.0 * c2, False, False, idx)
    xv = float(np.clip(-c1 / (2.0 * c2), x[0], x[-1]))
    av = float(c0 + xv * (c1 + xv * c2))
    return RefinedPeak(float(eps[idx] + xv), av, 2.0 * float(c2), False, True, idx)


def _smooth_reference(inten: np.ndarray, window_frac: float) -> np.ndarray:
    """Savitzky-Golay reference curve used for the residual bootstrap."""
    n = len(inten)
    w = max(5, int(round(window_frac * n)))
    if w % 2 == 0:
        w += 1
    if w > n:
        w = n if n % 2 == 1 else n - 1
    order = min(3, w - 1)
    return np.maximum(savgol_filter(inten, w, order), 0.0)


def _peak_of(eps: np.ndarray, inten: np.ndarray, floor_frac: float) -> tuple[RefinedPeak, AsymmetryCurve]:
    curve = empirical_asymmetry(Spectrum(eps, inten), floor_frac)
    return find_asymmetry_peak(curve), curve


@dataclass(frozen=True)
class CoherenceReport:
    """Full output of the coherence-estimation pipeline for one spectrum."""

    bound: float
    exact: Optional[CoherenceEstimate]
    peak: RefinedPeak
    curve: AsymmetryCurve
    flags: tuple[str, ...]
    n_boot: int
    n_boot_failed: int
    bound_std: float
    exact_std: Optional[float]
    bound_ci: tuple[float, float]
    exact_ci: Optional[tuple[float, float]]
    bound_rescaled: float
    rescale_factor: float
    rescale_ok: bool
    seed: int

    @property
    def exact_value(self) -> float:
        return self.exact.exact if self.exact is not None and self.exact.exact is not None else math.nan

    @property
    def ok(self) -> bool:
        return not self.flags


def estimate_coherence(
    spec: Spectrum,
    *,
    n_boot: int = 200,
    seed: int = 0,
    smooth: bool = True,
    smooth_window_frac: float = 0.05,
    floor_frac: float = 1e-9,
    rescale_factor: float = 3.7,
    baseline_status: str = "absent",
) -> CoherenceReport:
    """Estimate the coherence of a spectrum from its asymmetry peak.

    Point estimates come from the (optionally Savitzky-Golay smoothed)
    spectrum run through ``empirical_asymmetry`` and
    ``find_asymmetry_peak``: the peak height is the lower bound, the
    inversion cubic the exact value. Uncertainty comes from ``n_boot``
    residual-resampling bootstrap replicates of the same chain (residuals
    = data - smooth reference), with per-replicate generators spawned from
    ``SeedSequence(seed)``.

    The lower bound needs no energy-axis normalization: the estimate is
    recomputed with the detuning axis multiplied by ``rescale_factor`` and
    the two values are reported together with their agreement flag.

    ``baseline_status`` declares what is known about additive offsets in
    the data: "absent" (exact inversion valid) or "unknown". An unknown
    baseline cannot be detected from the spectrum itself (it has an exact
    full-coherence alias), so it must be declared; it lowers the asymmetry
    (the bound stays valid) but silently shifts the exact value, which is
    then flagged unreliable.
    """
    if baseline_status not in ("absent", "unknown"):
        raise ValueError(f"baseline_status must be 'absent' or 'unknown', got {baseline_status!r}")
    if n_boot < 0:
        raise ValueError("n_boot must be nonnegative")

    eps = spec.epsilon
    raw = spec.intensity
    ref = _smooth_reference(raw, smooth_window_frac) if smooth else np.array(raw)
    residuals = raw - ref

    flags: list[str] = []
    peak, curve = _peak_of(eps, ref, floor_frac)
    if peak.boundary:
        flags.append("boundary-peak")
    if peak.a_max == 0.0:
        flags.append("degenerate")

    exact: Optional[CoherenceEstimate] = None
    try:
        exact = invert_peak(peak.eps0, peak.a_max)
    except InconsistentPeakError:
        flags.append("inconsistent-peak")
    if baseline_status == "unknown" and exact is not None:
        flags.append("exact-unreliable-baseline")

    # bound invariance under detuning-axis rescaling (recorded, not assumed)
    peak_rs, _ = _peak_of(eps * rescale_factor, ref, floor_frac)
    bound_rescaled = peak_rs.a_max
    rescale_ok = abs(bound_rescaled - peak.a_max) <= 1e-9 * max(1.0, peak.a_max)

    # residual-resampling bootstrap of the whole chain
    bounds_bs: list[float] = []
    exacts_bs: list[float] = []
    n_failed = 0
    n = len(eps)
    for child in np.random.SeedSequence(seed).spawn(n_boot):
        rng = np.random.default_rng(child)
        replicate = np.maximum(ref + residuals[rng.integers(0, n, n)], 0.0)
        rep_ref = _smooth_reference(replicate, smooth_window_frac) if smooth else replicate
        try:
            p, _ = _peak_of(eps, rep_ref, floor_frac)
            bounds_bs.append(p.a_max)
            exacts_bs.append(invert_peak(p.eps0, p.a_max).exact)
        except (InconsistentPeakError, InsufficientCoverageError):
            n_failed += 1

    def _spread(vals: list[float]) -> tuple[float, tuple[float, float]]:
        if len(vals) < 2:
            return 0.0, (math.nan, math.nan)
        arr = np.asarray(vals)
        return float(np.std(arr, ddof=1)), (
            float(np.percentile(arr, 2.5)),
            float(np.percentile(arr, 97.5)),
        )

    bound_std, bound_ci = _spread(bounds_bs)
    exact_std, exact_ci = (None, None)
    if exact is not None:
        exact_std, exact_ci = _spread(exacts_bs)

    return CoherenceReport(
        bound=peak.a_max,
        exact=exact,
        peak=peak,
        curve=curve,
        flags=tuple(flags),
        n_boot=n_boot,
        n_boot_failed=n_failed,
        bound_std=bound_std,
        exact_std=exact_std,
        bound_ci=bound_ci,
        exact_ci=exact_ci,
        bound_rescaled=bound_rescaled,
        rescale_factor=rescale_factor,
        rescale_ok=rescale_ok,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# model fitting
# ---------------------------------------------------------------------------

_PARAM_ORDER = ("q", "g", "scale", "baseline")
_LOWER = {"q": -np.inf, "g": 0.0, "scale": 1e-12, "baseline": 0.0}
_UPPER = {"q": np.inf, "g": 1.0, "scale": np.inf, "baseline": np.inf}


@dataclass(frozen=True)
class FitResult:
    """Weighted least-squares fit of scale*I(eps; q, g) + baseline.

    ``covariance`` is over the free parameters in ``free_names`` order
    (rss/(n-p)-scaled Gauss-Newton approximation; pseudo-inverted when the
    Jacobian is singular). ``non_identifiable`` is set whenever all four
    parameters are free: the mimicry identity makes (q, g, scale, baseline)
    exact aliases of a full-coherence parameter point, so the parameter
    values are not unique even though the fitted curve is.
    """

    params: FanoParams
    scale: float
    baseline: float
    covariance: np.ndarray
    free_names: tuple[str, ...]
    frozen: dict[str, float]
    rss: float
    converged: bool
    non_identifiable: bool
    nfev: int
    message: str
    n_points: int

    def values(self) -> dict[str, float]:
        return {
            "q": self.params.q,
            "g": self.params.g,
            "scale": self.scale,
            "baseline": self.baseline,
        }


def _fit_model(eps: np.ndarray, q: float, g: float, scale: float, baseline: float) -> np.ndarray:
    return scale * fano_intensity(eps, FanoParams(q, min(max(g, 0.0), 1.0))) + baseline


def _default_starts(spec: Spectrum, free: tuple[str, ...], frozen: dict[str, float]) -> list[dict[str, float]]:
    """Multi-start grid: both q signs x g in {0.3, 0.7, 1.0}."""
    inten = spec.intensity
    s0 = max(float(np.max(inten) - min(0.0, float(np.min(inten)))), 1e-6)
    b0 = 0.5 * float(np.min(inten))
    try:
        peak, _ = _peak_of(spec.epsilon, inten, 1e-9)
        eps0 = max(peak.eps0, 0.3)
    except (InsufficientCoverageError, ValueError):
        eps0 = 1.0
    starts = []
    for g0 in (0.3, 0.7, 1.0):
        q_mag = math.sqrt(max(eps0 * eps0 - 2.0 * (1.0 - g0), 0.25))
        for sign in (1.0, -1.0):
            start = {"q": sign * q_mag, "g": g0, "scale": s0, "baseline": b0}
            start.update(frozen)
            starts.append(start)
    return starts


def fit_spectrum(
    spec: Spectrum,
    *,
    freeze: Optional[dict[str, float]] = None,
    init: Optional[dict[str, float]] = None,
    weights: Optional[np.ndarray] = None,
    max_nfev: int = 5000,
) -> FitResult:
    """Fit scale*I(eps; q, g) + baseline to a spectrum.

    ``freeze`` maps parameter names to fixed values; the rest are free
    (bounds: g in [0,1], scale > 0, baseline >= 0). Without ``init`` a
    multi-start over the q sign and g in {0.3, 0.7, 1.0} is run and the
    lowest-rss solution kept. ``weights`` multiply the residuals (1/sigma
    convention).
    """
    frozen = dict(freeze) if freeze else {}
    for name in frozen:
        if name not in _PARAM_ORDER:
            raise ValueError(f"unknown parameter {name!r}; expected one of {_PARAM_ORDER}")
    free = tuple(n for n in _PARAM_ORDER if n not in frozen)
    if not free:
        raise ValueError("all parameters frozen; nothing to fit")
    if len(free) > len(spec) - 1:
        raise ValueError(f"{len(free)} free parameters need at least {len(free)+1} samples")

    eps, inten = spec.epsilon, spec.intensity
    w = np.ones_like(inten) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != inten.shape or np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be positive, finite, and match the sample count")

    def unpack(x: np.ndarray) -> dict[str, float]:
        vals = dict(frozen)
        vals.update(zip(free, x))
        return vals

    def residual(x: np.ndarray) -> np.ndarray:
        v = unpack(x)
        return w * (_fit_model(eps, v["q"], v["g"], v["scale"], v["baseline"]) - inten)

    lb = np.array([_LOWER[n] for n in free])
    ub = np.array([_UPPER[n] for n in free])
    if init is not None:
        for name in init:
            if name not in _PARAM_ORDER:
                raise ValueError(f"unknown parameter {name!r}; expected one of {_PARAM_ORDER}")
            if name in frozen:
                raise ValueError(f"parameter {name!r} is frozen; remove it from init")
        start = dict(_default_starts(spec, free, frozen)[0])
        start.update(init)
        start.update(frozen)
        start_sets = [start]
    else:
        start_sets = _default_starts(spec, free, frozen)

    best = None
    for start in start_sets:
        x0 = np.clip(np.array([start[n] for n in free], dtype=float), lb, ub)
        res = least_squares(
            residual, x0, bounds=(lb, ub), method="trf",
            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev,
        )
        if best is None or res.cost < best.cost:
            best = res

    vals = unpack(best.x)
    rss = float(2.0 * best.cost)
    n, p = len(eps), len(free)
    jtj = best.jac.T @ best.jac
    sigma2 = rss / (n - p) if n > p else math.nan
    try:
        cov = sigma2 * np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = sigma2 * np.linalg.pinv(jtj)
    return FitResult(
        params=FanoParams(vals["q"], min(max(vals["g"], 0.0), 1.0)),
        scale=vals["scale"],
        baseline=vals["baseline"],
        covariance=cov,
        free_names=free,
        frozen=frozen,
        rss=rss,
        converged=bool(best.success),
        non_identifiable=len(free) == len(_PARAM_ORDER),
        nfev=int(best.nfev),
        message=str(best.message),
        n_points=n,
    )


# ---------------------------------------------------------------------------
# multi-q pooling
# ---------------------------------------------------------------------------


class QEstimate(NamedTuple):
    """One per-q coherence measurement for pooling."""

    q: float
    exact: Optional[float]
    sigma: Optional[float]
    bound: float

    @classmethod
    def from_report(cls, q: float, report: CoherenceReport) -> "QEstimate":
        exact = report.exact.exact if report.exact is not None else None
        return cls(q, exact, report.exact_std, report.bound)


@dataclass(frozen=True)
class PooledEstimate:
    """Inverse-variance pooled coherence over spectra with different q.

    Falls back to a pooled lower bound (the max of per-q bounds, itself a
    valid bound) when fewer than two usable exact estimates exist.
    ``inconsistent`` flags any entry deviating from the pooled mean by more
    than 3 of its own sigma.
    """

    g_pooled: Optional[float]
    sigma_pooled: Optional[float]
    per_q: tuple[tuple[float, float, float], ...]  # (q, g_hat, weight)
    dispersion: float
    inconsistent: bool
    bound_pooled: float
    bound_only: bool


def combine_multi_q(entries: Sequence[QEstimate]) -> PooledEstimate:
    """Pool per-q estimates of g assuming g is independent of q."""
    if len(entries) < 2:
        raise ValueError("pooling requires at least 2 estimates")
    bounds = [e.bound for e in entries if math.isfinite(e.bound)]
    usable = [
        e for e in entries
        if e.exact is not None and e.sigma is not None
        and math.isfinite(e.exact) and math.isfinite(e.sigma) and e.sigma > 0.0
    ]
    if not bounds and not usable:
        raise ValueError("no usable estimates or bounds to pool")
    bound_pooled = max(bounds) if bounds else 0.0

    if len(usable) < 2:
        return PooledEstimate(None, None, (), 0.0, False, bound_pooled, True)

    wts = np.array([1.0 / (e.sigma**2) for e in usable])
    ghats = np.array([e.exact for e in usable])
    g_pooled = float(np.sum(wts * ghats) / np.sum(wts))
    sigma_pooled = float(1.0 / math.sqrt(np.sum(wts)))
    dispersion = float(math.sqrt(np.sum(wts * (ghats - g_pooled) ** 2) / np.sum(wts)))
    inconsistent = bool(np.any(np.abs(ghats - g_pooled) > 3.0 * np.array([e.sigma for e in usable])))
    per_q = tuple((e.q, float(e.exact), float(wi)) for e, wi in zip(usable, wts))
    return PooledEstimate(g_pooled, sigma_pooled, per_q, dispersion, inconsistent, bound_pooled, False)
