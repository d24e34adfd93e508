"""Noisy-data pipeline: synthesis, empirical asymmetry, estimation, fitting."""
import math

import numpy as np
import pytest

from fanolab import (
    FanoParams,
    InsufficientCoverageError,
    NoiseModel,
    QEstimate,
    Spectrum,
    asymmetry_closed_form,
    combine_multi_q,
    empirical_asymmetry,
    estimate_coherence,
    fano_intensity,
    find_asymmetry_peak,
    fit_spectrum,
    mimicry_map,
    symmetric_grid,
    synth_spectrum,
)

P38 = FanoParams(3.0, 0.8)
TRUE_PEAK = (3.0659419433511785, 0.7827936876641307)


class TestSpectrum:
    def test_valid(self):
        eps = np.linspace(-1, 1, 9)
        s = Spectrum(eps, np.ones(9), {"kind": "test"})
        assert len(s) == 9 and s.meta["kind"] == "test"

    def test_validation(self):
        eps = np.linspace(-1, 1, 9)
        with pytest.raises(ValueError, match="at least"):
            Spectrum(eps[:5], np.ones(5))
        with pytest.raises(ValueError, match="increasing"):
            Spectrum(eps[::-1], np.ones(9))
        with pytest.raises(ValueError, match="nonnegative"):
            Spectrum(eps, np.full(9, -0.1))
        with pytest.raises(ValueError, match="finite"):
            Spectrum(eps, np.full(9, math.nan))
        with pytest.raises(ValueError, match="equal length"):
            Spectrum(eps, np.ones(8))


class TestSymmetricGrid:
    def test_exact_mirror(self):
        grid = symmetric_grid(12.0, 1000)
        assert len(grid) == 2001
        assert grid[1000] == 0.0
        np.testing.assert_array_equal(grid, -grid[::-1])
        assert grid[-1] == 12.0

    def test_validation(self):
        with pytest.raises(ValueError):
            symmetric_grid(0.0, 10)
        with pytest.raises(ValueError):
            symmetric_grid(1.0, 0)


class TestNoiseModel:
    def test_none_is_identity(self):
        clean = np.linspace(0, 1, 20)
        noisy, clamped = NoiseModel.none().apply(clean)
        np.testing.assert_array_equal(noisy, clean)
        assert clamped == 0

    def test_gaussian_seeded_determinism(self):
        clean = np.ones(100)
        a, _ = NoiseModel.gaussian(0.1, seed=42).apply(clean)
        b, _ = NoiseModel.gaussian(0.1, seed=42).apply(clean)
        c, _ = NoiseModel.gaussian(0.1, seed=43).apply(clean)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_gaussian_clamps_negative(self):
        clean = np.zeros(1000)
        noisy, clamped = NoiseModel.gaussian(1.0, seed=1).apply(clean)
        assert clamped > 0
        assert np.all(noisy >= 0.0)

    def test_poisson_scaling(self):
        clean = np.full(20000, 0.5)
        noisy, clamped = NoiseModel.poisson(1000.0, seed=2).apply(clean)
        assert clamped == 0
        assert np.mean(noisy) == pytest.approx(0.5, rel=0.02)
        # variance of counts/scale is mean/scale
        assert np.var(noisy) == pytest.approx(0.5 / 1000.0, rel=0.1)

    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseModel("gaussian", sigma=0.0)
        with pytest.raises(ValueError):
            NoiseModel("poisson", counts_scale=-1.0)
        with pytest.raises(ValueError):
            NoiseModel("sometimes")
        with pytest.raises(ValueError):
            NoiseModel("gaussian", sigma=1.0, seed=-1)


class TestSynthSpectrum:
    def test_noiseless_identity(self):
        grid = symmetric_grid(8.0, 100)
        spec = synth_spectrum(P38, grid)
        np.testing.assert_array_equal(spec.intensity, fano_intensity(grid, P38))
        assert spec.meta["q"] == 3.0 and spec.meta["g"] == 0.8
        assert spec.meta["clamped"] == 0

    def test_ideal_landmarks(self):
        grid = np.array([-2.0, -1.0, 0.0, 0.25, 0.5, 1.0, 2.0, 3.0])
        spec = synth_spectrum(FanoParams(2.0, 1.0), grid)
        assert spec.intensity[0] == pytest.approx(0.0, abs=1e-15)  # eps = -q
        assert spec.intensity[4] == pytest.approx(1.0, rel=1e-14)  # eps = 1/q

    def test_scale_baseline(self):
        grid = symmetric_grid(5.0, 50)
        spec = synth_spectrum(P38, grid, scale=2.0, baseline=0.25)
        np.testing.assert_allclose(
            spec.intensity, 2.0 * fano_intensity(grid, P38) + 0.25, rtol=1e-15
        )
        with pytest.raises(ValueError):
            synth_spectrum(P38, grid, scale=0.0)
        with pytest.raises(ValueError):
            synth_spectrum(P38, grid, baseline=-0.1)

    def test_seeded_determinism_bitwise(self):
        grid = symmetric_grid(8.0, 200)
        a = synth_spectrum(P38, grid, noise=NoiseModel.gaussian(0.05, seed=9))
        b = synth_spectrum(P38, grid, noise=NoiseModel.gaussian(0.05, seed=9))
        np.testing.assert_array_equal(a.intensity, b.intensity)
        assert a.meta == b.meta


class TestEmpiricalAsymmetry:
    def test_matches_closed_form_on_symmetric_grid(self):
        grid = symmetric_grid(12.0, 1000)
        spec = synth_spectrum(P38, grid)
        curve = empirical_asymmetry(spec)
        expected = asymmetry_closed_form(curve.eps, P38)
        np.testing.assert_allclose(curve.a, expected, atol=1e-13)

    def test_matches_closed_form_on_offset_grid(self):
        # a half-step offset breaks mirror symmetry, forcing actual
        # interpolation at every -eps
        eps = np.linspace(-12.0, 12.0, 6000) + 0.0007
        spec = Spectrum(eps, fano_intensity(eps, P38))
        curve = empirical_asymmetry(spec)
        interior = curve.eps < 10.0
        expected = asymmetry_closed_form(curve.eps[interior], P38)
        assert np.max(np.abs(curve.a[interior] - expected)) > 0.0  # not exact
        np.testing.assert_allclose(curve.a[interior], expected, atol=1e-6)

    def test_even_function_gives_zero(self):
        grid = symmetric_grid(10.0, 500)
        spec = synth_spectrum(FanoParams(3.0, 0.0), grid)
        curve = empirical_asymmetry(spec)
        assert float(np.max(curve.a)) < 1e-12

    def test_scale_invariance(self):
        grid = symmetric_grid(12.0, 800)
        base = synth_spectrum(P38, grid)
        scaled = Spectrum(grid, 137.5 * base.intensity)
        a0 = empirical_asymmetry(base)
        a1 = empirical_asymmetry(scaled)
        np.testing.assert_allclose(a1.a, a0.a, atol=1e-12)
        assert a1.n_dropped == a0.n_dropped

    def test_baseline_strictly_reduces_asymmetry(self):
        grid = symmetric_grid(12.0, 800)
        plain = empirical_asymmetry(synth_spectrum(P38, grid))
        offset = empirical_asymmetry(synth_spectrum(P38, grid, baseline=0.5))
        live = plain.a > 1e-12
        assert np.all(offset.a[live] < plain.a[live])
        assert float(np.max(offset.a)) < 0.782795

    def test_denominator_floor_drops_points(self):
        # q = 0, g = 1 has I(0) = 0 exactly, so the symmetric sum vanishes
        # at eps = 0 and the point must be dropped rather than divided
        grid = symmetric_grid(8.0, 400)
        spec = synth_spectrum(FanoParams(0.0, 1.0), grid)
        curve = empirical_asymmetry(spec)
        assert curve.n_dropped >= 1
        assert np.all(np.isfinite(curve.a))

    def test_insufficient_coverage(self):
        eps = np.linspace(0.5, 10.0, 50)
        spec = Spectrum(eps, np.ones(50))
        with pytest.raises(InsufficientCoverageError):
            empirical_asymmetry(spec)


class TestFindAsymmetryPeak:
    def test_dense_noiseless_accuracy(self):
        grid = symmetric_grid(12.0, 4000)
        curve = empirical_asymmetry(synth_spectrum(P38, grid))
        pk = find_asymmetry_peak(curve)
        assert pk.refined and not pk.boundary
        assert pk.eps0 == pytest.approx(TRUE_PEAK[0], abs=1e-3)
        assert pk.a_max == pytest.approx(TRUE_PEAK[1], abs=1e-4)
        assert pk.curvature < 0.0

    def test_coarse_grid_refinement(self):
        # step 0.5: raw argmax can be off by ~step/2; the parabola recovers
        # the peak value to ~1e-2 and improves the position estimate
        grid = symmetric_grid(12.0, 24)
        curve = empirical_asymmetry(synth_spectrum(P38, grid))
        pk = find_asymmetry_peak(curve)
        raw_eps = curve.eps[int(np.argmax(curve.a))]
        assert abs(raw_eps - TRUE_PEAK[0]) <= 0.25 + 1e-12
        assert abs(pk.a_max - TRUE_PEAK[1]) < 1e-2
        assert abs(pk.eps0 - TRUE_PEAK[0]) < 0.05
        assert abs(pk.eps0 - TRUE_PEAK[0]) < abs(raw_eps - TRUE_PEAK[0])

    def test_boundary_flag_on_monotone_data(self):
        eps = np.linspace(0.1, 5.0, 40)
        a = eps / 6.0  # strictly increasing, peak outside window
        pk = find_asymmetry_peak((eps, a))
        assert pk.boundary and not pk.refined
        assert pk.eps0 == eps[-1]

    def test_accepts_tuple_and_validates(self):
        with pytest.raises(ValueError):
            find_asymmetry_peak((np.array([1.0, 2.0]), np.array([0.1, 0.2])))
        with pytest.raises(ValueError):
            find_asymmetry_peak((np.arange(5.0), np.ones(5)), n_fit=7)


class TestEstimateCoherence:
    def test_noiseless_reference(self):
        grid = symmetric_grid(12.0, 1000)
        rep = estimate_coherence(synth_spectrum(P38, grid), n_boot=0)
        assert rep.bound == pytest.approx(0.7828, abs=1e-3)
        assert rep.exact_value == pytest.approx(0.800, abs=1e-3)
        assert rep.flags == ()
        assert rep.ok

    def test_rescale_invariance_recorded(self):
        grid = symmetric_grid(12.0, 1000)
        rep = estimate_coherence(synth_spectrum(P38, grid), n_boot=0)
        assert rep.rescale_ok
        assert rep.bound_rescaled == pytest.approx(rep.bound, abs=1e-9)

    def test_bootstrap_determinism(self):
        grid = symmetric_grid(12.0, 500)
        spec = synth_spectrum(P38, grid, noise=NoiseModel.gaussian(0.01, seed=5))
        a = estimate_coherence(spec, n_boot=60, seed=17)
        b = estimate_coherence(spec, n_boot=60, seed=17)
        assert (a.bound, a.exact_value, a.bound_std, a.exact_std, a.bound_ci, a.exact_ci) == (
            b.bound, b.exact_value, b.bound_std, b.exact_std, b.bound_ci, b.exact_ci
        )
        np.testing.assert_array_equal(a.curve.a, b.curve.a)
        c = estimate_coherence(spec, n_boot=60, seed=18)
        assert c.bound_std != a.bound_std

    def test_bootstrap_uncertainty_covers_truth(self):
        grid = symmetric_grid(12.0, 1000)
        spec = synth_spectrum(P38, grid, noise=NoiseModel.gaussian(0.01, seed=1007))
        rep = estimate_coherence(spec, n_boot=100, seed=7)
        assert rep.exact_std is not None and rep.exact_std > 0.0
        assert abs(rep.exact_value - 0.8) <= 4.0 * rep.exact_std
        lo, hi = rep.exact_ci
        assert lo < hi

    def test_baseline_unknown_flags_exact(self):
        grid = symmetric_grid(12.0, 1000)
        spec = synth_spectrum(P38, grid, baseline=0.3)
        rep = estimate_coherence(spec, n_boot=0, baseline_status="unknown")
        assert "exact-unreliable-baseline" in rep.flags
        # the bound survives contamination
        assert rep.bound <= 0.8 + 1e-12
        with pytest.raises(ValueError):
            estimate_coherence(spec, baseline_status="mystery")

    def test_incoherent_spectrum_estimates_near_zero(self):
        grid = symmetric_grid(10.0, 500)
        rep = estimate_coherence(synth_spectrum(FanoParams(3.0, 0.0), grid), n_boot=0)
        assert rep.bound < 1e-10
        assert rep.exact_value < 1e-10 or rep.exact is None

    def test_constant_spectrum_is_degenerate(self):
        grid = symmetric_grid(10.0, 100)
        rep = estimate_coherence(Spectrum(grid, np.ones(len(grid))), n_boot=0, smooth=False)
        assert "degenerate" in rep.flags
        assert "inconsistent-peak" in rep.flags
        assert rep.exact is None
        assert math.isnan(rep.exact_value)
        assert not rep.ok

    def test_consistency_over_doubling_steps(self):
        # grid density and counts both double, three levels: the seeded
        # average error must shrink monotonically
        means = []
        for k in range(3):
            grid = symmetric_grid(12.0, 250 * 2**k)
            sigma = 0.02 / math.sqrt(2.0**k)
            errs = []
            for s in range(12):
                spec = synth_spectrum(
                    P38, grid, noise=NoiseModel.gaussian(sigma, seed=500 + s)
                )
                rep = estimate_coherence(spec, n_boot=0)
                errs.append(abs(rep.exact_value - 0.8))
            means.append(float(np.mean(errs)))
        assert means[0] > means[1] > means[2]


class TestFitSpectrum:
    def test_freeze_scale_baseline_recovers_params(self):
        grid = symmetric_grid(12.0, 1000)
        spec = synth_spectrum(P38, grid)
        fit = fit_spectrum(spec, freeze={"scale": 1.0, "baseline": 0.0})
        assert fit.converged and not fit.non_identifiable
        assert fit.params.q == pytest.approx(3.0, abs=1e-8)
        assert fit.params.g == pytest.approx(0.8, abs=1e-8)
        assert fit.free_names == ("q", "g")
        assert fit.covariance.shape == (2, 2)

    def test_freeze_q_recovers_g_with_baseline_free(self):
        grid = symmetric_grid(12.0, 1000)
        spec = synth_spectrum(P38, grid)
        fit = fit_spectrum(spec, freeze={"q": 3.0})
        assert fit.params.g == pytest.approx(0.8, abs=1e-8)
        assert fit.scale == pytest.approx(1.0, abs=1e-8)
        assert fit.baseline == pytest.approx(0.0, abs=1e-8)

    def test_all_free_degenerate_with_alias(self):
        grid = symmetric_grid(12.0, 1000)
        spec = synth_spectrum(P38, grid)
        alias = mimicry_map(3.0, 0.8).alias_params(1.0, 0.0)
        at_truth = fit_spectrum(spec, init={"q": 3.0, "g": 0.8, "scale": 1.0, "baseline": 0.0})
        at_alias = fit_spectrum(
            spec,
            init={"q": alias[0], "g": alias[1], "scale": alias[2], "baseline": alias[3]},
        )
        assert at_truth.non_identifiable and at_alias.non_identifiable
        assert at_truth.rss < 1e-16 and at_alias.rss < 1e-16
        assert abs(at_truth.params.q - at_alias.params.q) > 0.1

    def test_recovers_scale_and_baseline(self):
        grid = symmetric_grid(12.0, 1000)
        spec = synth_spectrum(P38, grid, scale=3.0, baseline=0.5)
        fit = fit_spectrum(spec, freeze={"q": 3.0, "g": 0.8})
        assert fit.scale == pytest.approx(3.0, rel=1e-8)
        assert fit.baseline == pytest.approx(0.5, rel=1e-8)

    def test_noisy_fit_near_truth(self):
        grid = symmetric_grid(12.0, 1000)
        spec = synth_spectrum(P38, grid, noise=NoiseModel.gaussian(0.01, seed=3))
        fit = fit_spectrum(spec, freeze={"baseline": 0.0})
        assert fit.converged
        assert fit.params.q == pytest.approx(3.0, abs=0.1)
        assert fit.params.g == pytest.approx(0.8, abs=0.05)
        err_g = math.sqrt(fit.covariance[fit.free_names.index("g")][fit.free_names.index("g")])
        assert abs(fit.params.g - 0.8) < 5.0 * err_g

    def test_weights_and_validation(self):
        grid = symmetric_grid(12.0, 500)
        spec = synth_spectrum(P38, grid)
        w = np.ones(len(spec))
        fit = fit_spectrum(spec, freeze={"scale": 1.0, "baseline": 0.0}, weights=w)
        assert fit.params.g == pytest.approx(0.8, abs=1e-8)
        with pytest.raises(ValueError):
            fit_spectrum(spec, weights=np.ones(3))
        with pytest.raises(ValueError):
            fit_spectrum(spec, freeze={"q": 1.0, "g": 0.5, "scale": 1.0, "baseline": 0.0})
        with pytest.raises(ValueError):
            fit_spectrum(spec, freeze={"rho": 1.0})

    def test_minimal_sample_count_fits(self):
        eps = np.linspace(-2.0, 2.0, 8)
        tiny = Spectrum(eps, fano_intensity(eps, P38))
        fit = fit_spectrum(tiny, freeze={"scale": 1.0, "baseline": 0.0})
        assert fit.n_points == 8
        assert fit.params.g == pytest.approx(0.8, abs=1e-6)


class TestCombineMultiQ:
    def _entry(self, q, exact, sigma, bound):
        return QEstimate(q, exact, sigma, bound)

    def test_identical_estimates(self):
        e = self._entry(3.0, 0.8, 0.02, 0.78)
        pooled = combine_multi_q([e, e])
        assert pooled.g_pooled == pytest.approx(0.8)
        assert pooled.dispersion == pytest.approx(0.0, abs=1e-15)
        assert not pooled.inconsistent and not pooled.bound_only

    def test_inverse_variance_example(self):
        pooled = combine_multi_q(
            [self._entry(0.5, 0.79, 0.02, 0.49), self._entry(3.0, 0.81, 0.02, 0.78)]
        )
        assert pooled.g_pooled == pytest.approx(0.80, abs=1e-12)
        assert pooled.sigma_pooled == pytest.approx(0.014, abs=2e-3)
        assert pooled.dispersion == pytest.approx(0.01, abs=1e-12)

    def test_weighting_prefers_smaller_sigma(self):
        pooled = combine_multi_q(
            [self._entry(1.0, 0.7, 0.01, 0.6), self._entry(2.0, 0.9, 0.1, 0.7)]
        )
        assert abs(pooled.g_pooled - 0.7) < abs(pooled.g_pooled - 0.9)

    def test_bounds_only_fallback(self):
        pooled = combine_multi_q(
            [self._entry(0.5, None, None, 0.49), self._entry(3.0, None, None, 0.78)]
        )
        assert pooled.bound_only
        assert pooled.g_pooled is None
        assert pooled.bound_pooled == pytest.approx(0.78)

    def test_inconsistency_flag(self):
        pooled = combine_multi_q(
            [self._entry(1.0, 0.5, 0.01, 0.4), self._entry(2.0, 0.9, 0.01, 0.8)]
        )
        assert pooled.inconsistent

    def test_validation(self):
        with pytest.raises(ValueError):
            combine_multi_q([self._entry(1.0, 0.8, 0.02, 0.7)])
        with pytest.raises(ValueError):
            combine_multi_q(
                [
                    self._entry(1.0, None, None, math.nan),
                    self._entry(2.0, None, None, math.inf),
                ]
            )

    def test_from_report(self):
        grid = symmetric_grid(12.0, 500)
        rep = estimate_coherence(synth_spectrum(P38, grid), n_boot=20, seed=1)
        entry = QEstimate.from_report(3.0, rep)
        assert entry.q == 3.0
        assert entry.exact == rep.exact.exact
        assert entry.bound == rep.bound
