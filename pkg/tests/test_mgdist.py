import math
from math import factorial

import numpy as np
import pytest
from scipy import integrate
from scipy.optimize import brentq
from scipy.special import comb, gammaincc, gammaln
from scipy.stats import kstest

from conftest import random_mg
from uavnoma.channel import A2GLinkParams, ResidualParams, ShadowedRicianParams
from uavnoma.mgdist import (
    ExceedanceSpec,
    MGDist,
    exceed_i0,
    exceed_i1,
    exceed_i2,
    exceed_in,
    from_a2g,
    from_g2g,
    from_residual,
    mg_cdf,
    mg_pdf,
    mg_sample,
    upper_gamma_int,
)

FC = 3e9
SR = ShadowedRicianParams(m=5, b=0.5, omega=1.0)
LINK = A2GLinkParams(m=3, eta_los_db=1.6, eta_nlos_db=23.0, fc_hz=FC, p_los=0.4)


def quad_i1(d0, d1, p0, q0, w1):
    f = lambda x1: mg_pdf(d1, x1) * exceed_i0(d0, p0 * x1 + q0)
    v, _ = integrate.quad(f, w1, np.inf, limit=400)
    return v


def quad_i2(d0, d1, d2, p0, q0, p1, q1, w2):
    def inner(x2):
        f = lambda x1: mg_pdf(d1, x1) * exceed_i0(d0, p0 * x1 + q0)
        v, _ = integrate.quad(f, p1 * x2 + q1, np.inf, limit=300)
        return v

    v, _ = integrate.quad(lambda x2: mg_pdf(d2, x2) * inner(x2), w2, np.inf, limit=300)
    return v


class TestDensity:
    def test_exponential_at_origin(self):
        d = MGDist([1.0], [2.5], [1])
        assert mg_pdf(d, 0.0) == pytest.approx(1.0 / 2.5, rel=1e-12)

    def test_normalization_ground_mixture(self):
        d = from_g2g(SR, 1.0)
        total, _ = integrate.quad(lambda x: mg_pdf(d, x), 0, np.inf, limit=300)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_nonnegative_on_grid(self):
        dists = [
            from_g2g(SR, 1.0),
            from_a2g(LINK, 15.0, FC),
            from_residual(ResidualParams(0.1, 1.0)),
        ]
        for d in dists:
            grid = np.linspace(0, 20 * d.mean, 1000)
            assert np.all(mg_pdf(d, grid) >= 0)

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            MGDist([0.5, 0.4], [1.0, 1.0], [1, 2])


class TestCdf:
    def test_bounds(self, rng):
        d = random_mg(rng)
        assert mg_cdf(d, 0.0) == 0.0
        assert mg_cdf(d, 1e6 * d.mean) == pytest.approx(1.0, abs=1e-12)

    def test_exponential_value(self):
        d = MGDist([1.0], [1.7], [1])
        assert mg_cdf(d, 1.7) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)

    def test_matches_integrated_pdf(self, rng):
        d = random_mg(rng)
        for x in [0.3, 1.1, 4.0]:
            num, _ = integrate.quad(lambda t: mg_pdf(d, t), 0, x, limit=200)
            assert mg_cdf(d, x) == pytest.approx(num, abs=1e-8)

    def test_negative_rejected(self):
        d = MGDist([1.0], [1.0], [1])
        with pytest.raises(ValueError):
            mg_cdf(d, -0.1)


class TestUpperGamma:
    def test_order_one(self):
        for x in [0.0, 0.5, 3.0, 20.0]:
            assert upper_gamma_int(1, x) == pytest.approx(math.exp(-x), rel=1e-12)

    def test_at_origin(self):
        assert upper_gamma_int(3, 0.0) == pytest.approx(2.0, rel=1e-12)

    def test_quadrature_oracle(self):
        # frozen from integrating t^3 e^-t over [2, inf)
        assert upper_gamma_int(4, 2.0) == pytest.approx(5.1427407629912825, rel=1e-10)

    def test_large_argument_stable(self):
        v = upper_gamma_int(5, 700.0)
        ref = float(gammaincc(5, 700.0) * math.gamma(5))
        assert np.isfinite(v) and v > 0
        assert v == pytest.approx(ref, rel=1e-10)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            upper_gamma_int(0, 1.0)


class TestCorollaryMappings:
    def test_g2g_single_component_when_unshadowed(self):
        d = from_g2g(ShadowedRicianParams(m=1, b=0.5, omega=1.0), 1.0)
        assert d.chi.size == 1 and d.mu[0] == 1

    def test_g2g_weights_normalized(self):
        for m in range(1, 7):
            d = from_g2g(ShadowedRicianParams(m=m, b=0.5, omega=1.0), 2.5e-7)
            assert abs(d.chi.sum() - 1.0) <= 1e-9

    def test_g2g_mean_quadrature_oracle(self):
        # oracle: moment of the raw shadowing density, scaled by path loss
        pathloss = 2.5e-7
        sr = SR
        bd = sr.beta - sr.delta

        def raw_pdf(x):
            s = 1.0
            for l in range(1, sr.m):
                zeta = comb(sr.m - 1, l, exact=True) * sr.delta**l
                s += zeta * x**l / factorial(l)
            return sr.alpha * np.exp(-bd * x) * s

        mean, _ = integrate.quad(lambda x: x * raw_pdf(x), 0, np.inf, limit=300)
        d = from_g2g(sr, pathloss)
        assert d.mean == pytest.approx(mean * pathloss, rel=1e-6)

    def test_a2g_pure_los(self):
        link = A2GLinkParams(m=3, eta_los_db=1.6, eta_nlos_db=23.0, fc_hz=FC, p_los=1.0)
        d = from_a2g(link, 10.0, FC)
        assert d.chi.size == 1 and d.mu[0] == 3

    def test_a2g_weights(self):
        d = from_a2g(LINK, 10.0, FC)
        assert d.chi.sum() == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.slow
    def test_a2g_median_consistency(self, rng):
        d = from_a2g(LINK, 15.0, FC)
        x = mg_sample(d, rng, 1_000_000)
        assert mg_cdf(d, float(np.median(x))) == pytest.approx(0.5, abs=0.002)

    def test_residual_exponential_form(self):
        d = from_residual(ResidualParams(0.1, 2.0))
        assert d.mean == pytest.approx(0.2, rel=1e-12)
        for x in [0.05, 0.3, 1.0]:
            assert mg_cdf(d, x) == pytest.approx(1.0 - math.exp(-x / 0.2), rel=1e-12)

    def test_residual_degenerate_rejected(self):
        with pytest.raises(ValueError):
            from_residual(ResidualParams(0.0, 1.0))

    @pytest.mark.slow
    def test_residual_matches_sampler(self, rng):
        from uavnoma.channel import sample_residual_power

        params = ResidualParams(0.1, 1.0)
        d = from_residual(params)
        x = sample_residual_power(params, rng, 1_000_000)
        assert kstest(x, lambda v: mg_cdf(d, v)).statistic < 0.002


class TestExceedI0:
    def test_total_probability(self, rng):
        d = random_mg(rng)
        assert exceed_i0(d, 0.0) == 1.0

    def test_exponential(self):
        d = MGDist([1.0], [2.0], [1])
        assert exceed_i0(d, 2.0) == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_median_by_root_finding(self):
        d = from_a2g(LINK, 15.0, FC)
        lo, hi = 1e-20, 100 * d.mean
        median = brentq(lambda x: mg_cdf(d, x) - 0.5, lo, hi, xtol=1e-30, rtol=1e-14)
        assert exceed_i0(d, median) == pytest.approx(0.5, abs=1e-8)

    def test_complement_of_cdf(self, rng):
        d = random_mg(rng)
        for w in [0.1, 0.9, 3.3]:
            assert exceed_i0(d, w) == pytest.approx(1.0 - mg_cdf(d, w), abs=1e-10)


class TestExceedI1:
    def test_independence_factorization(self, rng):
        d0, d1 = random_mg(rng), random_mg(rng)
        v = exceed_i1(d0, d1, ExceedanceSpec((0.0,), (0.7,), 1.1))
        assert v == pytest.approx(exceed_i0(d0, 0.7) * exceed_i0(d1, 1.1), abs=1e-12)

    def test_iid_exponential_half(self):
        d = MGDist([1.0], [1.7], [1])
        assert exceed_i1(d, d, ExceedanceSpec((1.0,), (0.0,), 0.0)) == pytest.approx(0.5, abs=1e-12)

    def test_quadrature_oracle(self, rng):
        for _ in range(6):
            d0, d1 = random_mg(rng), random_mg(rng)
            p0, q0, w1 = rng.uniform(0, 2, 3)
            cf = exceed_i1(d0, d1, ExceedanceSpec((p0,), (q0,), w1))
            assert cf == pytest.approx(quad_i1(d0, d1, p0, q0, w1), abs=1e-8)

    @pytest.mark.slow
    def test_monte_carlo_oracle(self, rng):
        n = 10_000_000
        for seed in range(5):
            r = np.random.default_rng(seed)
            d0, d1 = random_mg(r), random_mg(r)
            p0, q0, w1 = r.uniform(0, 2, 3)
            cf = exceed_i1(d0, d1, ExceedanceSpec((p0,), (q0,), w1))
            g0, g1 = mg_sample(d0, r, n), mg_sample(d1, r, n)
            est = np.mean((g0 > p0 * g1 + q0) & (g1 > w1))
            sd = math.sqrt(max(cf * (1 - cf), 1e-12) / n)
            assert abs(cf - est) <= 3 * sd + 1e-9


class TestExceedI2:
    def test_factorization(self, rng):
        d0, d1, d2 = (random_mg(rng) for _ in range(3))
        v = exceed_i2(d0, d1, d2, ExceedanceSpec((0.0, 0.0), (0.5, 0.8), 0.2))
        expect = exceed_i0(d0, 0.5) * exceed_i0(d1, 0.8) * exceed_i0(d2, 0.2)
        assert v == pytest.approx(expect, abs=1e-12)

    def test_vanishing_tail(self, rng):
        d0, d1, d2 = (random_mg(rng) for _ in range(3))
        v = exceed_i2(d0, d1, d2, ExceedanceSpec((0.5, 0.5), (0.1, 0.1), 1e9))
        assert v <= 1e-12

    def test_quadrature_oracle(self, rng):
        for _ in range(4):
            d0, d1, d2 = (random_mg(rng) for _ in range(3))
            p0, q0, p1, q1, w2 = rng.uniform(0, 2, 5)
            cf = exceed_i2(d0, d1, d2, ExceedanceSpec((p0, p1), (q0, q1), w2))
            assert cf == pytest.approx(quad_i2(d0, d1, d2, p0, q0, p1, q1, w2), abs=1e-6)

    @pytest.mark.slow
    def test_monte_carlo_oracle(self, rng):
        n = 10_000_000
        for seed in range(5):
            r = np.random.default_rng(100 + seed)
            d0, d1, d2 = (random_mg(r) for _ in range(3))
            p0, q0, p1, q1, w2 = r.uniform(0, 1.5, 5)
            cf = exceed_i2(d0, d1, d2, ExceedanceSpec((p0, p1), (q0, q1), w2))
            g0, g1, g2 = (mg_sample(d, r, n) for d in (d0, d1, d2))
            est = np.mean((g0 > p0 * g1 + q0) & (g1 > p1 * g2 + q1) & (g2 > w2))
            sd = math.sqrt(max(cf * (1 - cf), 1e-12) / n)
            assert abs(cf - est) <= 3 * sd + 1e-9


class TestExceedIn:
    def test_depth_zero_matches_i0(self, rng):
        d = random_mg(rng)
        for w in [0.0, 0.4, 2.2]:
            v = exceed_in([d], ExceedanceSpec((), (), w))
            assert v == pytest.approx(exceed_i0(d, w), abs=1e-10)

    def test_depth_one_matches_i1(self, rng):
        for _ in range(5):
            d0, d1 = random_mg(rng), random_mg(rng)
            p0, q0, w1 = rng.uniform(0, 2, 3)
            spec = ExceedanceSpec((p0,), (q0,), w1)
            assert exceed_in([d0, d1], spec) == pytest.approx(
                exceed_i1(d0, d1, spec), abs=1e-10
            )

    def test_depth_mismatch(self, rng):
        d = random_mg(rng)
        with pytest.raises(ValueError):
            exceed_in([d, d], ExceedanceSpec((0.5, 0.5), (0.1, 0.1), 0.2))

    @pytest.mark.slow
    def test_depth_three_monte_carlo(self, rng):
        n = 5_000_000
        r = np.random.default_rng(7)
        dists = [random_mg(r) for _ in range(4)]
        p = r.uniform(0, 1.5, 3)
        q = r.uniform(0, 1.0, 3)
        w = r.uniform(0, 1.0)
        cf = exceed_in(dists, ExceedanceSpec(tuple(p), tuple(q), float(w)))
        g = [mg_sample(d, r, n) for d in dists]
        ind = (
            (g[0] > p[0] * g[1] + q[0])
            & (g[1] > p[1] * g[2] + q[1])
            & (g[2] > p[2] * g[3] + q[2])
            & (g[3] > w)
        )
        est = ind.mean()
        sd = math.sqrt(max(cf * (1 - cf), 1e-12) / n)
        assert abs(cf - est) <= 3 * sd + 1e-9


class TestProperties:
    def test_results_in_unit_interval(self, rng):
        for _ in range(20):
            d0, d1 = random_mg(rng), random_mg(rng)
            p0, q0, w1 = rng.uniform(0, 5, 3)
            v = exceed_i1(d0, d1, ExceedanceSpec((p0,), (q0,), w1))
            assert 0.0 <= v <= 1.0

    def test_monotone_in_offsets_and_threshold(self, rng):
        d0, d1 = random_mg(rng), random_mg(rng)
        p0 = 0.7
        base = exceed_i1(d0, d1, ExceedanceSpec((p0,), (0.5,), 0.5))
        assert exceed_i1(d0, d1, ExceedanceSpec((p0,), (0.9,), 0.5)) <= base + 1e-12
        assert exceed_i1(d0, d1, ExceedanceSpec((p0,), (0.5,), 0.9)) <= base + 1e-12

    def test_infinite_offset_gives_zero(self, rng):
        d0, d1 = random_mg(rng), random_mg(rng)
        assert exceed_i1(d0, d1, ExceedanceSpec((0.5,), (np.inf,), 0.2)) == 0.0

    def test_negative_rejected(self, rng):
        d0, d1 = random_mg(rng), random_mg(rng)
        with pytest.raises(ValueError):
            exceed_i1(d0, d1, ExceedanceSpec((-0.1,), (0.0,), 0.0))
