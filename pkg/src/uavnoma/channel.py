"""Channel models for the four links.

Covers the shadowed-Rician ground link, the probabilistic-LoS Nakagami /
Rayleigh air-ground links, the urban-micro and free-space path loss laws,
and the exponential residual-interference model left behind by imperfect
SIC. Each model is exposed twice: as a random sampler (for Monte Carlo)
and as closed-form parameters (consumed by the mixture-of-Gamma layer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

C_LIGHT = 299792458.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def los_probability(elev_deg) -> float:
    """Line-of-sight probability of an air-ground link vs elevation angle.

    Logistic in the elevation angle (degrees); strictly increasing and
    bounded in (0, 1) on [0, 90].
    """
    e = np.asarray(elev_deg, dtype=float)
    if np.any(e < 0) or np.any(e > 90):
        raise ValueError("elevation angle must lie in [0, 90] degrees")
    out = 1.0 / (1.0 + 12.08 * np.exp(-0.11 * (e - 12.08)))
    return float(out) if np.isscalar(elev_deg) else out


def umi_pathloss_db(
    d_m: float, fc_ghz: float, gain_tx_dbi: float = 0.0, gain_rx_dbi: float = 0.0
) -> float:
    """Urban-micro path loss in dB (negative = attenuation), fc in GHz.

    Reference distance is 1 m; shorter links are rejected.
    """
    if d_m < 1.0:
        raise ValueError("distance below the 1 m reference")
    return (
        gain_tx_dbi
        + gain_rx_dbi
        - 22.7
        - 26.0 * math.log10(fc_ghz)
        - 36.7 * math.log10(d_m / 1.0)
    )


def freespace_gain(d_m: float, fc_hz: float) -> float:
    """Free-space power gain (lambda / 4 pi d)^2, linear."""
    if d_m <= 0:
        raise ValueError("distance must be positive")
    return ((C_LIGHT / fc_hz) / (4.0 * math.pi * d_m)) ** 2


def a2g_pathloss_db(
    d_m: float, fc_hz: float, los: bool, eta_los_db: float, eta_nlos_db: float
) -> float:
    """Air-ground path loss in dB: free space minus the LoS/NLoS excess."""
    fs = 10.0 * math.log10(freespace_gain(d_m, fc_hz))
    return fs - (eta_los_db if los else eta_nlos_db)


@dataclass(frozen=True)
class ShadowedRicianParams:
    """Shadowed-Rician small-scale model for the ground-to-ground link.

    m: integer shadowing severity; b: half the multipath power;
    omega: average LoS power. All linear.
    """

    m: int
    b: float
    omega: float

    def __post_init__(self):
        if self.m < 1 or int(self.m) != self.m:
            raise ValueError("m must be a positive integer")
        if self.b <= 0 or self.omega < 0:
            raise ValueError("need b > 0 and omega >= 0")

    @property
    def beta(self) -> float:
        return 1.0 / (2.0 * self.b)

    @property
    def delta(self) -> float:
        return self.omega / (2.0 * self.b * (2.0 * self.b * self.m + self.omega))

    @property
    def alpha(self) -> float:
        return self.beta * (2.0 * self.b * self.m / (2.0 * self.b * self.m + self.omega)) ** self.m


@dataclass(frozen=True)
class A2GLinkParams:
    """Air-ground link: Nakagami-m LoS branch, Rayleigh NLoS branch."""

    m: int
    eta_los_db: float
    eta_nlos_db: float
    fc_hz: float
    p_los: float

    def __post_init__(self):
        if self.m < 1 or int(self.m) != self.m:
            raise ValueError("m must be a positive integer")
        if not 0.0 <= self.p_los <= 1.0:
            raise ValueError("p_los must lie in [0, 1]")
        if not (math.isfinite(self.eta_los_db) and math.isfinite(self.eta_nlos_db)):
            raise ValueError("link attenuations must be finite")


@dataclass(frozen=True)
class ResidualParams:
    """Residual-interference channel after imperfect SIC.

    xi is the residual level in [0, 1]; mean_gain is the expected power
    gain of the link whose signal was cancelled. xi = 0 models perfect
    SIC (the residual is the constant zero).
    """

    xi: float
    mean_gain: float

    def __post_init__(self):
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError("xi must lie in [0, 1]")
        if self.mean_gain <= 0:
            raise ValueError("mean gain must be positive")


def g2g_mixture(params: ShadowedRicianParams, pathloss_linear: float):
    """Gamma-mixture representation of the shadowed-Rician power gain.

    Returns (weights, scales, shapes) for the m-component mixture that is
    exactly the small-scale power density scaled by the path loss. Raw
    weights sum to one analytically; they are renormalized to absorb
    floating-point residue.
    """
    m = params.m
    bd = params.beta - params.delta
    scale = pathloss_linear / bd
    weights = np.empty(m)
    shapes = np.empty(m, dtype=np.int64)
    weights[0] = params.alpha / bd
    shapes[0] = 1
    for l in range(1, m):
        zeta_l = comb(m - 1, l, exact=True) * params.delta**l
        weights[l] = params.alpha * zeta_l / bd ** (l + 1)
        shapes[l] = l + 1
    weights /= weights.sum()
    return weights, np.full(m, scale), shapes


def a2g_branch_gains(link: A2GLinkParams, d_m: float) -> tuple[float, float]:
    """(LoS, NLoS) average power gains of an air-ground link, linear."""
    fs = freespace_gain(d_m, link.fc_hz)
    return fs / db_to_linear(link.eta_los_db), fs / db_to_linear(link.eta_nlos_db)


def mean_gain(link: A2GLinkParams, d_m: float) -> float:
    """Expected power gain of an air-ground link, linear.

    LoS-probability mixture of the two branch gains. The Nakagami LoS
    branch has unit-mean small-scale power, so the LoS term carries no
    extra 1/m factor (verified against numerical integration of the
    branch densities).
    """
    los, nlos = a2g_branch_gains(link, d_m)
    return link.p_los * los + (1.0 - link.p_los) * nlos


def sample_g2g_power(
    params: ShadowedRicianParams,
    pathloss_linear: float,
    rng: np.random.Generator,
    size=None,
):
    """Draw shadowed-Rician channel power gains (small-scale x path loss)."""
    weights, scales, shapes = g2g_mixture(params, pathloss_linear)
    k = rng.choice(len(weights), size=size, p=weights)
    return rng.gamma(shapes[k], scales[k])


def sample_a2g_power(
    params: A2GLinkParams,
    d_m: float,
    fc_hz: float,
    rng: np.random.Generator,
    size=None,
):
    """Draw air-ground channel power gains.

    One LoS/NLoS Bernoulli per draw (block fading within a frame), then a
    unit-mean Nakagami-m power (Gamma) or Rayleigh power (exponential),
    scaled by the matching path loss.
    """
    if fc_hz != params.fc_hz:
        raise ValueError("carrier frequency disagrees with the link parameters")
    los_gain, nlos_gain = a2g_branch_gains(params, d_m)
    los = rng.random(size) < params.p_los
    shape = np.where(los, params.m, 1)
    scale = np.where(los, los_gain / params.m, nlos_gain)
    return rng.gamma(shape, scale)


def sample_residual_power(
    params: ResidualParams, rng: np.random.Generator, size=None
):
    """Draw residual-interference powers: exponential with mean xi * mean_gain."""
    if params.xi == 0.0:
        return np.zeros(size if size is not None else ())
    return rng.exponential(params.xi * params.mean_gain, size=size)
