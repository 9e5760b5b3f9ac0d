"""Per-trial decoding engine.

Implements the two-phase uplink frame: in phase 1 the center user
transmits to the fusion center and, together with the edge user, to the
relay; in phase 2 the center user and the (decode-and-forward) relay
transmit to the fusion center. Receivers run SIC with either an adaptive
order (chosen per realization from the instantaneous channel power gains)
or one of four fixed orders. All rate targets use half-frame prefactors,
so a rate target R maps to the SINR threshold 2^(2R) - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# decoding orders: first element = relay, second = fusion center
ADM = "adm"
NADM_ORDERS = {
    "d1": ("C", "C"),
    "d2": ("E", "C"),
    "d3": ("C", "E"),
    "d4": ("E", "E"),
}
MECHANISMS = (ADM, "d1", "d2", "d3", "d4")


def sinr_threshold(rate_bits: float) -> float:
    """SINR threshold for a target rate under the half-frame prefactor."""
    return 2.0 ** (2.0 * rate_bits) - 1.0


@dataclass(frozen=True)
class PowerAllocation:
    """Phase power splits: theta is the center user's share of each budget."""

    theta1: float
    theta2: float
    p_max1: float
    p_max2: float

    def __post_init__(self):
        t1 = np.asarray(self.theta1)
        t2 = np.asarray(self.theta2)
        if np.any(t1 < 0) or np.any(t1 > 1) or np.any(t2 < 0) or np.any(t2 > 1):
            raise ValueError("theta must lie in [0, 1]")
        if self.p_max1 <= 0 or self.p_max2 <= 0:
            raise ValueError("power budgets must be positive")

    @property
    def p_c1(self):
        return self.theta1 * self.p_max1

    @property
    def p_e(self):
        return (1.0 - self.theta1) * self.p_max1

    @property
    def p_c2(self):
        return self.theta2 * self.p_max2

    @property
    def p_u(self):
        return (1.0 - self.theta2) * self.p_max2


@dataclass(frozen=True)
class Thresholds:
    """SINR thresholds and the derived exceedance constants.

    The phase-1 family (a1, a2, alpha1, alpha2) normalizes the relay-side
    decode conditions; the phase-2 family (b1, b2, beta1, beta2) the
    fusion-center ones. a1_fc is the phase-1 direct-link threshold at the
    fusion center (differs from a1 only when the two noise powers do).
    Entries may be arrays when built from batched allocations; divided-out
    constants are +inf where a transmit power is zero, with `degenerate`
    flagging such allocations.
    """

    tau_c: float
    tau_e: float
    a1: object
    a2: object
    alpha1: object
    alpha2: object
    b1: object
    b2: object
    beta1: object
    beta2: object
    a1_fc: object
    degenerate: object

    @property
    def cap_a1(self):
        """A1 = a1 / (1 - alpha1), valid where alpha1 < 1."""
        return _ratio_cap(self.a1, self.alpha1)

    @property
    def cap_a2(self):
        return _ratio_cap(self.a2, self.alpha2)

    @property
    def cap_b1(self):
        return _ratio_cap(self.b1, self.beta1)

    @property
    def cap_b2(self):
        return _ratio_cap(self.b2, self.beta2)


def _ratio_cap(a, alpha):
    a = np.asarray(a, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(alpha < 1.0, a / np.maximum(1.0 - alpha, 1e-300), np.inf)
    return float(out) if out.ndim == 0 else out


def _safe_div(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    return out if out.ndim else float(out)


def derive_thresholds(scenario, powers: PowerAllocation) -> Thresholds:
    """Build the exceedance constants from rate targets, noise, and powers.

    `scenario` only needs r_th_c, r_th_e, sigma2_u_w, sigma2_f_w. Zero
    transmit power with a positive rate target makes the corresponding
    constants infinite and sets the degenerate flag.
    """
    tau_c = sinr_threshold(scenario.r_th_c)
    tau_e = sinr_threshold(scenario.r_th_e)
    s2u = scenario.sigma2_u_w
    s2f = scenario.sigma2_f_w
    if s2u <= 0 or s2f <= 0:
        raise ValueError("noise powers must be positive")

    p_c1, p_e, p_c2, p_u = powers.p_c1, powers.p_e, powers.p_c2, powers.p_u
    a1 = _safe_div(tau_c * s2u, p_c1)
    a2 = _safe_div(tau_e * s2u, p_e)
    alpha1 = _safe_div(tau_c * p_e, p_c1)
    alpha2 = _safe_div(tau_e * p_c1, p_e)
    b1 = _safe_div(tau_c * s2f, p_c2)
    b2 = _safe_div(tau_e * s2f, p_u)
    beta1 = _safe_div(tau_c * p_u, p_c2)
    beta2 = _safe_div(tau_e * p_c2, p_u)
    a1_fc = _safe_div(tau_c * s2f, p_c1)
    degenerate = (
        ((np.asarray(p_c1) == 0) & (tau_c > 0))
        | ((np.asarray(p_e) == 0) & (tau_e > 0))
        | ((np.asarray(p_c2) == 0) & (tau_c > 0))
        | ((np.asarray(p_u) == 0) & (tau_e > 0))
    )
    return Thresholds(
        tau_c=tau_c,
        tau_e=tau_e,
        a1=a1,
        a2=a2,
        alpha1=alpha1,
        alpha2=alpha2,
        b1=b1,
        b2=b2,
        beta1=beta1,
        beta2=beta2,
        a1_fc=a1_fc,
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class TrialRealization:
    """One block-fading draw: channel power gains and residual powers."""

    phi_cu: float
    phi_eu: float
    phi_uf: float
    phi_cf: float
    res_cu: float = 0.0
    res_cf: float = 0.0
    res_uf: float = 0.0
    noise_u: float = 1.0
    noise_f: float = 1.0

    def __post_init__(self):
        vals = (
            self.phi_cu,
            self.phi_eu,
            self.phi_uf,
            self.phi_cf,
            self.res_cu,
            self.res_cf,
            self.res_uf,
        )
        if any(v < 0 for v in vals):
            raise ValueError("gains and residuals must be non-negative")


@dataclass(frozen=True)
class DecodeOutcome:
    """Per-trial decode flags and the branches taken."""

    xc1_ok: bool
    xe_at_uav_ok: bool
    uav_silent: bool
    xc2_ok: bool
    xe_ok: bool
    uav_branch: str  # "C" (SIC on the center signal first) or "E" (direct)
    fc_branch: str | None  # "C", "E", or None when the relay stayed silent

    def __post_init__(self):
        if self.uav_silent and self.xe_ok:
            raise ValueError("a silent relay cannot deliver the edge signal")


def _sinr(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf if num > 0 else 0.0
    return num / den


@dataclass(frozen=True)
class SinrSet:
    """All per-trial SINRs of the two-phase frame."""

    fc_xc1: float  # phase 1, fusion center, direct
    uav_xc1_ce: float  # relay, center signal under the SIC route
    uav_xe_ce: float  # relay, edge signal after SIC (residual-limited)
    uav_xe_ec: float  # relay, edge signal decoded directly
    fc_xc2_cu: float  # fusion center, center signal first
    fc_xe_cu: float  # fusion center, edge signal after SIC
    fc_xe_uc: float  # fusion center, edge signal first
    fc_xc2_uc: float  # fusion center, center signal after SIC
    fc_xc2_silent: float  # fusion center, relay silent (interference-free)


def sinr_set(trial: TrialRealization, powers: PowerAllocation) -> SinrSet:
    """Evaluate every phase-1/phase-2 SINR for one realization."""
    p_c1, p_e, p_c2, p_u = powers.p_c1, powers.p_e, powers.p_c2, powers.p_u
    s2u, s2f = trial.noise_u, trial.noise_f
    return SinrSet(
        fc_xc1=_sinr(p_c1 * trial.phi_cf, s2f),
        uav_xc1_ce=_sinr(p_c1 * trial.phi_cu, p_e * trial.phi_eu + s2u),
        uav_xe_ce=_sinr(p_e * trial.phi_eu, p_c1 * trial.res_cu + s2u),
        uav_xe_ec=_sinr(p_e * trial.phi_eu, p_c1 * trial.phi_cu + s2u),
        fc_xc2_cu=_sinr(p_c2 * trial.phi_cf, p_u * trial.phi_uf + s2f),
        fc_xe_cu=_sinr(p_u * trial.phi_uf, p_c2 * trial.res_cf + s2f),
        fc_xe_uc=_sinr(p_u * trial.phi_uf, p_c2 * trial.phi_cf + s2f),
        fc_xc2_uc=_sinr(p_c2 * trial.phi_cf, p_u * trial.res_uf + s2f),
        fc_xc2_silent=_sinr(p_c2 * trial.phi_cf, s2f),
    )


def _run_trial(
    trial: TrialRealization,
    powers: PowerAllocation,
    thresholds: Thresholds,
    uav_order: str | None,
    fc_order: str | None,
) -> DecodeOutcome:
    # cross-multiplied threshold tests keep this path bit-compatible with
    # the vectorized kernels
    p_c1, p_e, p_c2, p_u = powers.p_c1, powers.p_e, powers.p_c2, powers.p_u
    s2u, s2f = trial.noise_u, trial.noise_f
    tau_c, tau_e = thresholds.tau_c, thresholds.tau_e

    xc1_ok = p_c1 * trial.phi_cf > tau_c * s2f

    if uav_order is None:
        uav_branch = "C" if trial.phi_cu >= trial.phi_eu else "E"
    else:
        uav_branch = uav_order
    if uav_branch == "C":
        sic_ok = p_c1 * trial.phi_cu > tau_c * (p_e * trial.phi_eu + s2u)
        xe_at_uav = sic_ok and (
            p_e * trial.phi_eu > tau_e * (p_c1 * trial.res_cu + s2u)
        )
    else:
        xe_at_uav = p_e * trial.phi_eu > tau_e * (p_c1 * trial.phi_cu + s2u)
    uav_silent = not xe_at_uav

    if uav_silent:
        xc2_ok = p_c2 * trial.phi_cf > tau_c * s2f
        return DecodeOutcome(
            xc1_ok=bool(xc1_ok),
            xe_at_uav_ok=False,
            uav_silent=True,
            xc2_ok=bool(xc2_ok),
            xe_ok=False,
            uav_branch=uav_branch,
            fc_branch=None,
        )

    if fc_order is None:
        fc_branch = "C" if trial.phi_cf >= trial.phi_uf else "E"
    else:
        fc_branch = fc_order
    if fc_branch == "C":
        xc2_ok = p_c2 * trial.phi_cf > tau_c * (p_u * trial.phi_uf + s2f)
        xe_ok = xc2_ok and (
            p_u * trial.phi_uf > tau_e * (p_c2 * trial.res_cf + s2f)
        )
    else:
        xe_ok = p_u * trial.phi_uf > tau_e * (p_c2 * trial.phi_cf + s2f)
        xc2_ok = xe_ok and (
            p_c2 * trial.phi_cf > tau_c * (p_u * trial.res_uf + s2f)
        )
    return DecodeOutcome(
        xc1_ok=bool(xc1_ok),
        xe_at_uav_ok=True,
        uav_silent=False,
        xc2_ok=bool(xc2_ok),
        xe_ok=bool(xe_ok),
        uav_branch=uav_branch,
        fc_branch=fc_branch,
    )


def run_adm_trial(
    trial: TrialRealization, powers: PowerAllocation, thresholds: Thresholds
) -> DecodeOutcome:
    """Adaptive decoding: both receivers pick the SIC order per realization.

    The relay takes the SIC route when its center-link gain is at least
    its edge-link gain (ties go to the center); the fusion center orders
    analogously on its two phase-2 links. A relay that fails to decode
    the edge signal stays silent, and the fusion center then decodes the
    second center signal interference-free.
    """
    return _run_trial(trial, powers, thresholds, None, None)


def run_nadm_trial(
    trial: TrialRealization,
    powers: PowerAllocation,
    thresholds: Thresholds,
    order: str,
) -> DecodeOutcome:
    """Fixed decoding order "d1".."d4", otherwise identical to the adaptive run."""
    uav_order, fc_order = NADM_ORDERS[order]
    return _run_trial(trial, powers, thresholds, uav_order, fc_order)
