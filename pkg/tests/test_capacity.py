"""Tests for the nonlinear-channel capacity bounds and the MI estimator."""

import math

import numpy as np
import pytest

import swiptlab.capacity as cap
from swiptlab.capacity import (
    C1BoundParams,
    MonteCarloConfig,
    c1_asymptotic,
    c1_upper,
    c1_upper_optimized,
    c2_asymptotic,
    c2_upper,
    cnl_lower_chi2,
    cnl_upper,
    effective_proc_noise,
)
from swiptlab.core import LOG2E
from swiptlab.errors import InvalidParams, QuadratureFailure, SplitAtUnity, ZeroNoise

MC_FAST = MonteCarloConfig(n_samples=10_000, seed=42)


def c1_upper_delta0(hp, sigma_rec, beta):
    """Analytically simplified delta = 0 form of the upper bound."""
    sqrt_2pi = math.sqrt(2.0 * math.pi)
    return (
        math.log2(beta + sqrt_2pi * sigma_rec / 2.0)
        + (0.25 + (hp + sigma_rec / sqrt_2pi) / beta) * LOG2E
        - 0.5 * math.log2(2.0 * math.pi * math.e * sigma_rec ** 2)
    )


class TestC1Upper:
    def test_delta_zero_collapse(self):
        for hp, sr, beta in [(1.0, 1.0, 2.0), (100.0, 1.0, 80.0), (10.0, 3.0, 1.0)]:
            full = c1_upper(hp, sr, C1BoundParams(beta, 0.0))
            assert full == pytest.approx(c1_upper_delta0(hp, sr, beta), rel=1e-14)

    def test_scale_invariance(self):
        # jointly scaling (hP, sigma_rec, beta, delta) cannot change the bound
        a = c1_upper(100.0, 1.0, C1BoundParams(50.0, 2.0))
        b = c1_upper(1000.0, 10.0, C1BoundParams(500.0, 20.0))
        assert a == pytest.approx(b, rel=1e-13)

    def test_invalid_params(self):
        with pytest.raises(InvalidParams):
            C1BoundParams(0.0, 1.0)
        with pytest.raises(InvalidParams):
            C1BoundParams(1.0, -0.1)


class TestC1UpperOptimized:
    def test_small_power_limit(self):
        val, _ = c1_upper_optimized(1e-6, 1.0)
        assert 0.0 <= val <= 0.2

    def test_above_asymptote(self):
        val, _ = c1_upper_optimized(100.0, 1.0)
        assert val >= c1_asymptotic(100.0, 1.0)
        assert val <= c1_asymptotic(100.0, 1.0) + 1.0

    def test_reproduces_through_c1_upper(self):
        val, params = c1_upper_optimized(37.0, 2.5)
        assert c1_upper(37.0, 2.5, params) == val

    def test_never_above_grid_points(self):
        rng = np.random.default_rng(5)
        hp, sr = 50.0, 1.5
        opt, _ = c1_upper_optimized(hp, sr)
        for _ in range(10):
            beta = math.exp(rng.uniform(math.log(1e-3 * sr), math.log(1e3 * (hp + sr))))
            delta = rng.uniform(0.0, 10.0 * sr)
            assert opt <= c1_upper(hp, sr, C1BoundParams(beta, delta)) + 1e-12


class TestClosedFormBounds:
    def test_c1_asymptotic_values(self):
        assert c1_asymptotic(1.0, 1.0) == pytest.approx(-0.6044005442916777, rel=1e-14)
        assert c1_asymptotic(100.0, 1.0) == pytest.approx(
            math.log2(100) - 0.6044005442916777, rel=1e-14)

    def test_c1_asymptotic_doubling_adds_one_bit(self):
        assert c1_asymptotic(64.0, 1.0) - c1_asymptotic(32.0, 1.0) == pytest.approx(1.0)

    def test_c2_upper_values(self):
        assert c2_upper(0.0, 1.0) == pytest.approx(0.18802745565324408, rel=1e-12)
        assert c2_upper(100.0, 1.0) == pytest.approx(
            0.5 * math.log2(101) + 0.18802745565324408, rel=1e-12)

    def test_c2_quadrupling_high_snr(self):
        assert c2_upper(4e6, 1.0) - c2_upper(1e6, 1.0) == pytest.approx(1.0, abs=1e-5)

    def test_c2_asymptotic_values(self):
        assert c2_asymptotic(0.0, 1.0) == 0.0
        assert c2_asymptotic(100.0, 1.0) == pytest.approx(2.8362126709857476, rel=1e-14)

    def test_c2_asymptotic_below_upper_on_grid(self):
        for hp in np.logspace(-2, 4, 13):
            for s2a in np.logspace(-2, 2, 5):
                assert c2_asymptotic(hp, s2a) <= c2_upper(hp, s2a)

    def test_growth_rates_per_decade(self):
        # intensity-channel bound grows ~log2(P), noncoherent ~0.5*log2(P)
        c1 = [c1_asymptotic(p, 1.0) for p in (1e3, 1e4, 1e5)]
        c2 = [c2_asymptotic(p, 1.0) for p in (1e3, 1e4, 1e5)]
        for lo, hi in zip(c1, c1[1:]):
            assert hi - lo == pytest.approx(math.log2(10), rel=1e-12)
        for lo, hi in zip(c2, c2[1:]):
            assert hi - lo == pytest.approx(0.5 * math.log2(10), abs=2e-3)


class TestCnlUpper:
    def test_c1_branch_active_with_dominant_rectifier_noise(self):
        val = cnl_upper(100.0, 1e-4, 1.0)
        c1, _ = c1_upper_optimized(100.0, 1.0)
        assert val == c1
        assert c1 < c2_upper(100.0, 1e-4)

    def test_c2_branch_active_with_vanishing_rectifier_noise(self):
        val = cnl_upper(100.0, 1.0, 1e-4)
        assert val == c2_upper(100.0, 1.0)


class TestEffectiveProcNoise:
    def test_no_adc_noise(self):
        assert effective_proc_noise(2.5, 0.0, 0.7).sigma2_eff == 2.5

    def test_half_split(self):
        assert effective_proc_noise(0.0, 1.0, 0.5).sigma2_eff == pytest.approx(4.0)

    def test_rho_zero_is_plain_sum(self):
        assert effective_proc_noise(1.5, 2.5, 0.0).sigma2_eff == 4.0

    def test_strictly_increasing_in_rho(self):
        vals = [effective_proc_noise(1.0, 1.0, r).sigma2_eff for r in np.linspace(0, 0.99, 25)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_split_at_unity(self):
        with pytest.raises(SplitAtUnity):
            effective_proc_noise(1.0, 1.0, 1.0)
        assert effective_proc_noise(1.0, 0.0, 1.0).sigma2_eff == 1.0


class TestMiEstimator:
    def test_zero_received_power(self):
        est = cnl_lower_chi2(0.0, 1.0, 1.0, MC_FAST)
        assert est.value == pytest.approx(0.0, abs=1e-9)

    def test_noiseless_channel_rejected(self):
        with pytest.raises(ZeroNoise):
            cnl_lower_chi2(1.0, 0.0, 0.0, MC_FAST)

    def test_minimum_sample_count_enforced(self):
        with pytest.raises(InvalidParams):
            MonteCarloConfig(n_samples=100)

    def test_bit_reproducible(self):
        a = cnl_lower_chi2(10.0, 0.5, 1.0, MonteCarloConfig(n_samples=10_000, seed=9))
        b = cnl_lower_chi2(10.0, 0.5, 1.0, MonteCarloConfig(n_samples=10_000, seed=9))
        assert a == b

    def test_independent_of_chunking(self, monkeypatch):
        ref = cnl_lower_chi2(10.0, 0.5, 1.0, MC_FAST)
        monkeypatch.setattr(cap, "_CHUNK", 1111)
        alt = cnl_lower_chi2(10.0, 0.5, 1.0, MC_FAST)
        assert ref == alt

    def test_sandwich_against_upper_bound(self):
        for hp, s2a, s2r in [(100.0, 1e-4, 1.0), (10.0, 1.0, 1.0), (100.0, 1.0, 25.0)]:
            est = cnl_lower_chi2(hp, s2a, s2r, MC_FAST)
            ub = cnl_upper(hp, s2a, math.sqrt(s2r))
            assert est.value - 3.0 * est.std_error <= ub

    def test_intensity_limit_sandwich(self):
        # dominant rectifier noise: bounded by the optimized intensity bound
        est = cnl_lower_chi2(100.0, 1e-6, 1.0, MC_FAST)
        ub, _ = c1_upper_optimized(100.0, 1.0)
        assert 0.0 < est.value <= ub

    def test_noncoherent_limit_sandwich(self):
        # vanishing rectifier noise: bounded by the noncoherent bounds
        est = cnl_lower_chi2(100.0, 1.0, 0.0, MC_FAST)
        assert est.value <= c2_upper(100.0, 1.0)
        assert est.value >= c2_asymptotic(100.0, 1.0) - 0.5

    def test_against_entropy_oracle_intensity_channel(self):
        """Independent check: with no antenna noise, I(X;Y) = h(Y) - h(Z1); h(Y)
        from a histogram plug-in on fresh samples."""
        hp, s2r = 50.0, 16.0
        est = cnl_lower_chi2(hp, 0.0, s2r, MonteCarloConfig(n_samples=40_000, seed=3))

        rng = np.random.default_rng(1234)
        n = 1_000_000
        y = hp * rng.standard_normal(n) ** 2 + math.sqrt(s2r) * rng.standard_normal(n)
        counts, edges = np.histogram(y, bins=800)
        widths = np.diff(edges)
        p = counts / n
        nz = p > 0
        h_y = -np.sum(p[nz] * np.log2(p[nz] / widths[nz]))
        h_cond = 0.5 * math.log2(2.0 * math.pi * math.e * s2r)
        mi_oracle = h_y - h_cond
        assert est.value == pytest.approx(mi_oracle, abs=0.05)

    def test_serialization_fields(self):
        est = cnl_lower_chi2(1.0, 1.0, 1.0, MC_FAST)
        d = est.to_json_dict()
        assert d["n_samples"] == 10_000
        assert d["seed"] == 42
        assert d["quadrature_tolerance"] == MC_FAST.quad_tol


class TestPanelQuadrature:
    def test_failure_on_unresolvable_integrand(self):
        knots = np.array([[0.0, 0.5, 1.0]])

        def wild(t, active):
            # oscillation too fast for any node level to stabilize
            return np.sin(1e9 * t) ** 2 + np.sin(1.7e8 * t)

        with pytest.raises(QuadratureFailure):
            cap._panelized_integrals(knots, wild, 1e-14)

    def test_exact_on_polynomial(self):
        knots = np.array([[0.0, 1.0, 2.0], [0.0, 0.5, 3.0]])
        vals = cap._panelized_integrals(knots, lambda t, a: t ** 3, 1e-12)
        assert vals == pytest.approx([4.0, 81.0 / 4.0], rel=1e-13)
