"""Closed-form end-to-end outage probabilities and system throughput.

The eight building blocks rho1..rho8 are joint success probabilities of
the decode events under each receiver branch, expressed as exceedance
chains over the mixture-of-Gamma link distributions:

  rho1/rho2: relay decodes the edge signal via the SIC / direct branch.
  rho3/rho4: fusion center decodes the forwarded edge signal, per branch.
  rho5/rho6: fusion center decodes the second center signal, per branch.
  rho7/rho8: ground-link CDF at the phase-2 / phase-1 direct thresholds.

Two generic kernels cover all six branch probabilities; the four uses
differ only in which distributions and threshold constants they receive,
so the substitution tables are exercised through a single code path.
Every kernel is validated against the trial-level Monte Carlo engine in
the tests. Batched threshold constants (arrays) are supported throughout,
which is what makes grid searches over the power split cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import geometry
from .channel import (
    A2GLinkParams,
    ResidualParams,
    ShadowedRicianParams,
    db_to_linear,
    los_probability,
    mean_gain,
    umi_pathloss_db,
)
from .mgdist import (
    ExceedanceSpec,
    MGDist,
    exceed_chain_multi,
    exceed_in,
    from_a2g,
    from_g2g,
    from_residual,
    mg_cdf,
)
from .protocol import PowerAllocation, Thresholds, derive_thresholds


@dataclass(frozen=True)
class LinkSet:
    """Distances, link parameters, and MG distributions for one topology."""

    d_cu: float
    d_eu: float
    d_uf: float
    d_cf: float
    link_cu: A2GLinkParams
    link_eu: A2GLinkParams
    link_uf: A2GLinkParams
    sr_cf: ShadowedRicianParams
    pathloss_cf: float  # linear
    dist_cu: MGDist
    dist_eu: MGDist
    dist_uf: MGDist
    dist_cf: MGDist
    res_cu: MGDist | None  # None when the residual level is zero
    res_cf: MGDist | None
    res_uf: MGDist | None
    mean_cu: float
    mean_eu: float
    mean_uf: float
    mean_cf: float


@lru_cache(maxsize=64)
def build_links(scenario) -> LinkSet:
    """Assemble per-link parameters and distributions from a scenario."""
    topo = scenario.topology()
    fc_hz = scenario.fc_hz

    def a2g(m, a, b):
        d = geometry.distance(a, b)
        p = los_probability(geometry.elevation_angle_deg(a, b))
        link = A2GLinkParams(
            m=m,
            eta_los_db=scenario.eta_los_db,
            eta_nlos_db=scenario.eta_nlos_db,
            fc_hz=fc_hz,
            p_los=p,
        )
        return d, link

    d_cu, link_cu = a2g(scenario.m_cu, topo.pos_c, topo.pos_u)
    d_eu, link_eu = a2g(scenario.m_eu, topo.pos_e, topo.pos_u)
    d_uf, link_uf = a2g(scenario.m_uf, topo.pos_u, topo.pos_f)
    d_cf = geometry.distance(topo.pos_c, topo.pos_f)
    sr = ShadowedRicianParams(scenario.m_cf, scenario.sr_b, scenario.sr_omega)
    pathloss_cf = db_to_linear(
        umi_pathloss_db(d_cf, scenario.fc_ghz, scenario.gain_tx_dbi, scenario.gain_rx_dbi)
    )

    mean_cu = mean_gain(link_cu, d_cu)
    mean_eu = mean_gain(link_eu, d_eu)
    mean_uf = mean_gain(link_uf, d_uf)
    mean_cf = pathloss_cf  # ground-link reference gain is its path loss

    def residual(xi, mean):
        if xi == 0.0:
            return None
        return from_residual(ResidualParams(xi, mean))

    return LinkSet(
        d_cu=d_cu,
        d_eu=d_eu,
        d_uf=d_uf,
        d_cf=d_cf,
        link_cu=link_cu,
        link_eu=link_eu,
        link_uf=link_uf,
        sr_cf=sr,
        pathloss_cf=pathloss_cf,
        dist_cu=from_a2g(link_cu, d_cu, fc_hz),
        dist_eu=from_a2g(link_eu, d_eu, fc_hz),
        dist_uf=from_a2g(link_uf, d_uf, fc_hz),
        dist_cf=from_g2g(sr, pathloss_cf),
        res_cu=residual(scenario.xi_u, mean_cu),
        res_cf=residual(scenario.xi_f, mean_cf),
        res_uf=residual(scenario.xi_f, mean_uf),
        mean_cu=mean_cu,
        mean_eu=mean_eu,
        mean_uf=mean_uf,
        mean_cf=mean_cf,
    )


# --------------------------------------------------------------------------
# Generic branch-success kernels
# --------------------------------------------------------------------------


def _chain2(d0, d1, p0, q0, w1):
    return exceed_in([d0, d1], ExceedanceSpec((p0,), (q0,), w1))


def _eight_terms(d0, d1, dres, across, alpha1, a1, alpha2, a2, cap):
    """The eight exceedance terms of the SIC-branch expansion, j1..j8.

    j_k = Pr[g0 > p0 g1 + q0, g1 > p1 r + q1, r > w2] with the four
    (p1, q1, p0, q0) argument rows
        (alpha2, a2, alpha1, a1), (0, cap, alpha1, a1),
        (alpha2, a2, 1, 0),       (0, cap, 1, 0)
    each taken at w2 = across (odd k) and w2 = 0 (even k). The rows are
    stacked along the batch axis and the two thresholds share all chain
    levels, so everything costs a single chain evaluation. A degenerate
    residual (r identically zero) zeroes the w2 > 0 terms and collapses
    the middle condition to g1 > q1.
    """
    B = a1.shape[0]
    zeros = np.zeros_like(a1)
    ones = np.ones_like(a1)
    p1 = np.concatenate([alpha2, zeros, alpha2, zeros])
    q1 = np.concatenate([a2, cap, a2, cap])
    p0 = np.concatenate([alpha1, alpha1, ones, ones])
    q0 = np.concatenate([a1, a1, zeros, zeros])
    if dres is None:
        vals = _chain2(d0, d1, p0, q0, q1).reshape(4, B)
        at_zero = (vals[0], vals[1], vals[2], vals[3])
        at_across = tuple(np.where(across <= 0, v, 0.0) for v in at_zero)
    else:
        w_across = np.concatenate([across] * 4)
        va, vz = exceed_chain_multi(
            [d0, d1, dres], (p0, p1), (q0, q1), [w_across, np.zeros_like(w_across)]
        )
        at_across = tuple(va.reshape(4, B))
        at_zero = tuple(vz.reshape(4, B))
    j1, j3, j5, j7 = at_across
    j2, j4, j6, j8 = at_zero
    return j1, j2, j3, j4, j5, j6, j7, j8


def sic_branch_success(d0, d1, dres, alpha1, a1, alpha2, a2):
    """Pr[g0 > alpha1*g1 + a1, g1 > alpha2*r + a2, g0 >= g1].

    The joint probability that the receiver picks the branch whose
    first-decoded signal rides g0, decodes it against g1-interference,
    and then decodes the second signal against the SIC residual r. The
    branch condition g0 >= g1 is absorbed into one of three exceedance
    expansions depending on whether alpha1 < 1 and on how the crossover
    point A1 = a1/(1 - alpha1) compares with a2.
    """
    alpha1, a1, alpha2, a2 = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (alpha1, a1, alpha2, a2))
    )
    scalar = alpha1.ndim == 0
    if scalar:
        alpha1, a1, alpha2, a2 = (v.reshape(1) for v in (alpha1, a1, alpha2, a2))

    with np.errstate(divide="ignore", invalid="ignore"):
        cap = np.where(alpha1 < 1.0, a1 / np.maximum(1.0 - alpha1, 1e-300), np.inf)
        across = np.where(alpha2 > 0, (cap - a2) / np.where(alpha2 > 0, alpha2, 1.0), np.inf)

    case_ge = alpha1 >= 1.0
    case_split = ~case_ge & (cap > a2)
    # sanitize arguments that only matter inside their own case
    cap_s = np.where(case_split & np.isfinite(cap), cap, 1.0)
    across_s = np.where(case_split & np.isfinite(across), across, 1.0)
    across_dead = case_split & ~np.isfinite(across)  # alpha2 = 0, residual never binds

    j1, j2, j3, j4, j5, j6, j7, j8 = _eight_terms(
        d0, d1, dres, across_s, alpha1, a1, alpha2, a2, cap_s
    )
    # crossover beyond the residual's reach: the terms gated by it vanish
    j1 = np.where(across_dead, 0.0, j1)
    j3 = np.where(across_dead, 0.0, j3)
    j5 = np.where(across_dead, 0.0, j5)
    j7 = np.where(across_dead, 0.0, j7)

    split_val = j2 - j1 - j4 + j3 + j5 - j7 + j8
    out = np.where(case_ge, j2, np.where(case_split, split_val, j6))
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def direct_branch_success(d0, d1, alpha, a):
    """Pr[g0 > alpha*g1 + a, g0 > g1].

    Success of the branch that decodes its signal directly, treating the
    other transmission as interference. For alpha < 1 the two conditions
    swap dominance at g1 = a/(1 - alpha).
    """
    alpha, a = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(a, dtype=float))
    scalar = alpha.ndim == 0
    if scalar:
        alpha, a = alpha.reshape(1), a.reshape(1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cap = np.where(alpha < 1.0, a / np.maximum(1.0 - alpha, 1e-300), np.inf)
    cap_s = np.where(np.isfinite(cap), cap, 1.0)
    B = a.shape[0]
    # stack the (alpha, a) and (1, 0) chains along the batch axis
    p0 = np.concatenate([alpha, np.ones_like(a)])
    q0 = np.concatenate([a, np.zeros_like(a)])
    r1, r2 = exceed_chain_multi(
        [d0, d1],
        (p0,),
        (q0,),
        [np.concatenate([np.zeros_like(a), cap_s]), np.concatenate([cap_s, cap_s])],
    )
    base, plain = r1[:B], r1[B:]
    above = r2[:B]
    out = np.where(alpha < 1.0, base - above + plain, base)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


# --------------------------------------------------------------------------
# The eight blocks and their assembly
# --------------------------------------------------------------------------


def varrho1(links: LinkSet, th: Thresholds):
    """Relay decodes the edge signal via the SIC (center-first) branch."""
    return sic_branch_success(
        links.dist_cu, links.dist_eu, links.res_cu, th.alpha1, th.a1, th.alpha2, th.a2
    )


def varrho2(links: LinkSet, th: Thresholds):
    """Relay decodes the edge signal directly (edge-link dominant)."""
    return direct_branch_success(links.dist_eu, links.dist_cu, th.alpha2, th.a2)


def varrho3_4(links: LinkSet, th: Thresholds):
    """Fusion center decodes the forwarded edge signal, per branch."""
    v3 = sic_branch_success(
        links.dist_cf, links.dist_uf, links.res_cf, th.beta1, th.b1, th.beta2, th.b2
    )
    v4 = direct_branch_success(links.dist_uf, links.dist_cf, th.beta2, th.b2)
    return v3, v4


def varrho5_6(links: LinkSet, th: Thresholds):
    """Fusion center decodes the second center signal, per branch."""
    v5 = direct_branch_success(links.dist_cf, links.dist_uf, th.beta1, th.b1)
    v6 = sic_branch_success(
        links.dist_uf, links.dist_cf, links.res_uf, th.beta2, th.b2, th.beta1, th.b1
    )
    return v5, v6


def varrho7(links: LinkSet, th: Thresholds):
    """Ground-link CDF at the phase-2 interference-free threshold."""
    return mg_cdf(links.dist_cf, np.maximum(th.b1, 0.0))


def varrho8(links: LinkSet, th: Thresholds):
    """Ground-link CDF at the phase-1 direct threshold (phase-1 outage)."""
    return mg_cdf(links.dist_cf, np.maximum(th.a1_fc, 0.0))


@dataclass(frozen=True)
class OutageSet:
    """End-to-end outage probabilities plus their building blocks."""

    op_e: object  # edge signal, end to end
    op_c1: object  # center signal, phase 1
    op_c2: object  # center signal, phase 2
    varrhos: tuple  # rho1..rho8


def outage_set(scenario, powers: PowerAllocation) -> OutageSet:
    """Assemble the three end-to-end outage probabilities.

    The relay-success block (rho1 + rho2) multiplies the conditional
    fusion-center blocks; when the relay is silent the second-phase
    center decode is interference-free, which contributes the rho7 term.
    Accepts batched allocations (array thetas).
    """
    links = build_links(scenario)
    th = derive_thresholds(scenario, powers)
    v1 = varrho1(links, th)
    v2 = varrho2(links, th)
    v3, v4 = varrho3_4(links, th)
    v5, v6 = varrho5_6(links, th)
    v7 = varrho7(links, th)
    v8 = varrho8(links, th)

    relay_ok = np.clip(v1 + v2, 0.0, 1.0)
    op_e = np.clip(1.0 - relay_ok * np.clip(v3 + v4, 0.0, 1.0), 0.0, 1.0)
    op_c1 = np.clip(v8, 0.0, 1.0)
    op_c2 = np.clip(
        relay_ok * (1.0 - np.clip(v5 + v6, 0.0, 1.0)) + (1.0 - relay_ok) * v7, 0.0, 1.0
    )
    return OutageSet(op_e=op_e, op_c1=op_c1, op_c2=op_c2, varrhos=(v1, v2, v3, v4, v5, v6, v7, v8))


def throughput_from_ops(r_th_c, r_th_e, op_e, op_c1, op_c2):
    """Half-frame throughput: each delivered stream earns half its rate."""
    return (
        0.5 * r_th_c * (1.0 - op_c1)
        + 0.5 * r_th_e * (1.0 - op_e)
        + 0.5 * r_th_c * (1.0 - op_c2)
    )


def throughput(scenario, powers: PowerAllocation):
    """System throughput in bits/s/Hz for the adaptive mechanism."""
    ops = outage_set(scenario, powers)
    return throughput_from_ops(scenario.r_th_c, scenario.r_th_e, ops.op_e, ops.op_c1, ops.op_c2)
