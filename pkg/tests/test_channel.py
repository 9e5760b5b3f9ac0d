import math
from math import factorial

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.stats import kstest

from uavnoma import mgdist
from uavnoma.channel import (
    A2GLinkParams,
    ResidualParams,
    ShadowedRicianParams,
    a2g_branch_gains,
    a2g_pathloss_db,
    db_to_linear,
    freespace_gain,
    g2g_mixture,
    linear_to_db,
    los_probability,
    mean_gain,
    sample_a2g_power,
    sample_g2g_power,
    sample_residual_power,
    umi_pathloss_db,
)

FC = 3e9


class TestLosProbability:
    def test_logistic_midpoint(self):
        # the exponent vanishes at 12.08 degrees
        assert los_probability(12.08) == pytest.approx(1.0 / 13.08, rel=1e-12)

    def test_zenith(self):
        assert los_probability(90.0) == pytest.approx(0.997716247081094, rel=1e-12)

    def test_monotone_samples(self):
        assert los_probability(60.0) > los_probability(30.0)

    @given(st.floats(0, 90), st.floats(0, 90))
    def test_strictly_increasing_and_bounded(self, a, b):
        pa, pb = los_probability(a), los_probability(b)
        assert 0.0 < pa < 1.0
        if b - a > 1e-9:
            assert pa < pb

    def test_domain(self):
        with pytest.raises(ValueError):
            los_probability(-1.0)
        with pytest.raises(ValueError):
            los_probability(90.5)


class TestPathloss:
    def test_umi_reference(self):
        assert umi_pathloss_db(1.0, 3.0) == pytest.approx(-35.10515262271122, rel=1e-12)

    def test_umi_decade_slope(self):
        assert umi_pathloss_db(10.0, 3.0) - umi_pathloss_db(1.0, 3.0) == pytest.approx(-36.7)

    def test_umi_gains_additive(self):
        base = umi_pathloss_db(5.0, 3.0)
        assert umi_pathloss_db(5.0, 3.0, 3.0, 3.0) == pytest.approx(base + 6.0)

    def test_umi_below_reference(self):
        with pytest.raises(ValueError):
            umi_pathloss_db(0.5, 3.0)

    def test_a2g_los_value(self):
        assert a2g_pathloss_db(10.0, FC, True, 1.6, 23.0) == pytest.approx(
            -63.59020831627662, rel=1e-12
        )

    def test_a2g_los_nlos_gap(self):
        los = a2g_pathloss_db(10.0, FC, True, 1.6, 23.0)
        nlos = a2g_pathloss_db(10.0, FC, False, 1.6, 23.0)
        assert los - nlos == pytest.approx(23.0 - 1.6, abs=1e-12)

    def test_a2g_distance_doubling(self):
        shift = a2g_pathloss_db(20.0, FC, True, 1.6, 23.0) - a2g_pathloss_db(
            10.0, FC, True, 1.6, 23.0
        )
        assert shift == pytest.approx(-20.0 * math.log10(2.0), rel=1e-12)

    @given(st.floats(-300, 300))
    def test_db_roundtrip(self, x):
        assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-12)


def _link(m, p_los):
    return A2GLinkParams(m=m, eta_los_db=1.6, eta_nlos_db=23.0, fc_hz=FC, p_los=p_los)


class TestMeanGain:
    def test_pure_los_collapse(self):
        link = _link(1, 1.0)
        assert mean_gain(link, 10.0) == pytest.approx(
            freespace_gain(10.0, FC) / db_to_linear(1.6), rel=1e-12
        )

    def test_pure_nlos_collapse(self):
        link = _link(3, 0.0)
        assert mean_gain(link, 10.0) == pytest.approx(
            freespace_gain(10.0, FC) / db_to_linear(23.0), rel=1e-12
        )

    def test_quadrature_oracle(self):
        # frozen from numerical integration of the branch-density mixture
        link = _link(2, 0.5)
        assert mean_gain(link, 10.0) == pytest.approx(2.203352673245687e-07, rel=1e-9)

    def test_quadrature_oracle_live(self):
        # same oracle, evaluated here in path-loss-scaled units
        link = _link(2, 0.5)
        g_los, g_nlos = a2g_branch_gains(link, 10.0)
        scale = freespace_gain(10.0, FC)

        def pdf(t):
            los = t ** (link.m - 1) * np.exp(-t / ((g_los / scale) / link.m)) / (
                ((g_los / scale) / link.m) ** link.m * factorial(link.m - 1)
            )
            nlos = np.exp(-t / (g_nlos / scale)) / (g_nlos / scale)
            return link.p_los * los + (1 - link.p_los) * nlos

        mean_t, _ = integrate.quad(lambda t: t * pdf(t), 0, 50, limit=400)
        assert mean_gain(link, 10.0) == pytest.approx(scale * mean_t, rel=1e-9)


SR = ShadowedRicianParams(m=5, b=0.5, omega=1.0)


class TestShadowedRicianSampling:
    def test_positive_support(self, rng):
        x = sample_g2g_power(SR, 1.0, rng, 10_000)
        assert np.all(x > 0)

    @pytest.mark.slow
    def test_ks_against_mixture_cdf(self, rng):
        pathloss = 2.5e-7
        d = mgdist.from_g2g(SR, pathloss)
        x = sample_g2g_power(SR, pathloss, rng, 1_000_000)
        stat = kstest(x, lambda v: mgdist.mg_cdf(d, v)).statistic
        assert stat < 0.002

    def test_m1_collapses_to_exponential(self, rng):
        sr = ShadowedRicianParams(m=1, b=0.5, omega=1.0)
        weights, scales, shapes = g2g_mixture(sr, 1.0)
        assert weights.shape == (1,) and shapes[0] == 1
        x = sample_g2g_power(sr, 1.0, rng, 1_000_000)
        assert abs(x.mean() - scales[0]) / scales[0] < 0.01


class TestA2GSampling:
    def test_rayleigh_collapse(self, rng):
        link = _link(1, 1.0)
        x = sample_a2g_power(link, 10.0, FC, rng, 200_000)
        g_los, _ = a2g_branch_gains(link, 10.0)
        stat = kstest(x, lambda v: 1.0 - np.exp(-np.asarray(v) / g_los)).statistic
        assert stat < 0.004

    @pytest.mark.slow
    def test_mean_matches_mean_gain(self, rng):
        link = _link(3, 0.4)
        x = sample_a2g_power(link, 15.0, FC, rng, 1_000_000)
        assert abs(x.mean() - mean_gain(link, 15.0)) / mean_gain(link, 15.0) < 0.01

    @pytest.mark.slow
    def test_ks_against_mixture_cdf(self, rng):
        link = _link(3, 0.4)
        d = mgdist.from_a2g(link, 15.0, FC)
        x = sample_a2g_power(link, 15.0, FC, rng, 1_000_000)
        stat = kstest(x, lambda v: mgdist.mg_cdf(d, v)).statistic
        assert stat < 0.002


class TestResidualSampling:
    def test_perfect_sic_is_zero(self, rng):
        x = sample_residual_power(ResidualParams(0.0, 1.0), rng, 1000)
        assert np.all(x == 0.0)

    def test_mean(self, rng):
        x = sample_residual_power(ResidualParams(0.1, 1.0), rng, 1_000_000)
        assert abs(x.mean() - 0.1) / 0.1 < 0.01

    def test_median_over_mean_is_ln2(self, rng):
        x = sample_residual_power(ResidualParams(0.3, 2.0), rng, 1_000_000)
        assert abs(np.median(x) / x.mean() - math.log(2.0)) < 0.02 * math.log(2.0)


class TestParamValidation:
    def test_residual_range(self):
        with pytest.raises(ValueError):
            ResidualParams(1.5, 1.0)

    def test_sr_params(self):
        with pytest.raises(ValueError):
            ShadowedRicianParams(0, 0.5, 1.0)
        with pytest.raises(ValueError):
            ShadowedRicianParams(2, -0.5, 1.0)

    def test_a2g_params(self):
        with pytest.raises(ValueError):
            _link(0, 0.5)
        with pytest.raises(ValueError):
            _link(2, 1.5)
