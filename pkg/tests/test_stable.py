from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import integrate, special

from regshrink.errors import DomainError
from regshrink.stable import (
    kanter,
    positive_stable_cdf,
    positive_stable_logpdf,
    positive_stable_logsf,
    positive_stable_pdf,
    sample_positive_stable,
    sample_tilted_stable,
)

from conftest import ks_distance


def levy_pdf(x):
    # index 1/2 with Laplace transform exp(-sqrt(s))
    return x ** -1.5 * np.exp(-1.0 / (4.0 * x)) / (2.0 * math.sqrt(math.pi))


def levy_cdf(x):
    return special.erfc(1.0 / (2.0 * np.sqrt(x)))


class TestDensity:
    @pytest.mark.parametrize("x", [1e-3, 0.05, 0.3, 1.0, 4.0, 50.0, 1e4, 1e8])
    def test_half_index_closed_form(self, x):
        assert positive_stable_pdf(x, 0.5) == pytest.approx(levy_pdf(x), rel=1e-8)
        assert positive_stable_cdf(x, 0.5) == pytest.approx(levy_cdf(x), rel=1e-8, abs=1e-300)

    def test_tiny_argument_underflows_cleanly(self):
        assert positive_stable_logpdf(1e-300, 0.5) == -math.inf or \
            positive_stable_logpdf(1e-300, 0.5) < -1e200
        assert positive_stable_logpdf(None, 0.25, logx=-5000.0) == -math.inf
        assert positive_stable_pdf(0.0, 0.5) == 0.0

    @pytest.mark.parametrize("a", [0.1, 0.25, 0.7])
    @pytest.mark.parametrize("s", [0.5, 2.0])
    def test_laplace_transform(self, a, s):
        f = lambda t: math.exp(positive_stable_logpdf(None, a, logx=t) + t - s * math.exp(t))
        val = sum(integrate.quad(f, lo, hi, limit=400, epsabs=0)[0]
                  for lo, hi in [(-60, -5), (-5, 0), (0, 5), (5, 80)])
        assert val == pytest.approx(math.exp(-s ** a), rel=1e-7)

    @pytest.mark.parametrize("a", [0.2, 0.6])
    def test_pdf_integrates_to_cdf(self, a):
        f = lambda t: positive_stable_pdf(t, a)
        got = integrate.quad(f, 0, 2.0, points=[0.1, 0.5], limit=400)[0]
        assert got == pytest.approx(positive_stable_cdf(2.0, a), rel=1e-7)

    def test_survival_branches_agree(self):
        a = 0.4
        for x in (20.0, 40.0, 80.0):
            assert math.exp(positive_stable_logsf(x, a)) == pytest.approx(
                1 - positive_stable_cdf(x, a), rel=1e-6)

    def test_index_validation(self):
        for a in (0.0, 1.0, -0.2):
            with pytest.raises(DomainError):
                positive_stable_logpdf(1.0, a)


class TestSampling:
    @pytest.mark.parametrize("a", [0.3, 0.5, 0.75])
    def test_untilted_laplace_transform(self, a, rng):
        x = sample_positive_stable(a, rng, size=100_000)
        for s in (0.3, 1.0, 3.0):
            v = np.exp(-s * x)
            se = v.std() / math.sqrt(v.size)
            assert abs(v.mean() - math.exp(-s ** a)) < 4 * se

    def test_half_index_ks(self, rng):
        x = sample_positive_stable(0.5, rng, size=50_000)
        assert ks_distance(x, levy_cdf) < 0.01

    @pytest.mark.parametrize("method", ["naive", "double_rejection"])
    @pytest.mark.parametrize("a,t", [(0.25, 2.0), (0.5, 0.5), (0.8, 1.5)])
    def test_tilted_moments(self, a, t, method, rng):
        x, _ = sample_tilted_stable(a, np.full(50_000, t), rng, method=method)
        mean = a * t ** (a - 1)
        var = a * (1 - a) * t ** (a - 2)
        assert abs(x.mean() - mean) < 4 * math.sqrt(var / x.size)
        assert x.var() / var == pytest.approx(1.0, abs=0.06)

    @pytest.mark.parametrize("a,t", [(0.0625, 1e4), (0.5, 1e3), (0.9, 50.0)])
    def test_double_rejection_large_tilt(self, a, t, rng):
        x, rounds = sample_tilted_stable(a, np.full(50_000, t), rng)
        mean = a * t ** (a - 1)
        var = a * (1 - a) * t ** (a - 2)
        assert abs(x.mean() - mean) < 4 * math.sqrt(var / x.size)
        assert rounds < 50

    def test_half_index_tilted_ks(self, rng):
        # exp(-t x) f(x) / exp(-sqrt(t)) has an inverse-Gaussian law for a = 1/2
        t = 4.0
        x, _ = sample_tilted_stable(0.5, np.full(40_000, t), rng)
        from scipy import stats
        mu = 0.5 / math.sqrt(t)
        ig = stats.invgauss(mu / 0.5, scale=0.5)
        assert ks_distance(x, ig.cdf) < 0.012

    def test_zero_tilt_and_errors(self, rng):
        x, _ = sample_tilted_stable(0.5, np.zeros(10), rng)
        assert np.all(x > 0)
        with pytest.raises(DomainError):
            sample_tilted_stable(0.5, [-1.0], rng)
        with pytest.raises(DomainError):
            sample_tilted_stable(0.5, [1.0], rng, method="other")

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.05, 0.95), st.floats(0.0, 3.1))
    def test_kanter_positive(self, a, u):
        v = float(kanter(u, a))
        assert v > 0 and math.isfinite(v) or u > 3.1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_seed_determinism(self, seed):
        a = sample_tilted_stable(0.3, [0.0, 5.0, 500.0], np.random.default_rng(seed))[0]
        b = sample_tilted_stable(0.3, [0.0, 5.0, 500.0], np.random.default_rng(seed))[0]
        assert_allclose(a, b, rtol=0, atol=0)
