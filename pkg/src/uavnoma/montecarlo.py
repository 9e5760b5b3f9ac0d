"""Seeded, reproducible Monte Carlo estimation of outage and throughput.

Trials are partitioned into fixed-size chunks; each chunk draws from its
own counter-based stream keyed by (seed, chunk index), so estimates are
bit-identical regardless of how many workers process the chunks. All
mechanisms are evaluated on the same realizations (common random
numbers), which is also what makes per-trial branch-coincidence checks
between the adaptive and fixed orders meaningful.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .analytics import build_links, throughput_from_ops
from .channel import a2g_branch_gains, g2g_mixture
from .protocol import ADM, MECHANISMS, NADM_ORDERS, PowerAllocation, derive_thresholds

CHUNK = 1 << 17

_MODE = {"C": _kernels.FIRST_C, "E": _kernels.FIRST_E}


@dataclass(frozen=True)
class MCConfig:
    trials: int = 1_000_000
    seed: int = 0
    workers: int = 1
    z: float = 3.0  # CI half-width multiplier (3-sigma by default)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.workers < 1:
            raise ValueError("need at least one worker")


@dataclass(frozen=True)
class MechanismEstimate:
    op_e: float
    op_c1: float
    op_c2: float
    throughput: float
    ci_op_e: float
    ci_op_c1: float
    ci_op_c2: float
    ci_throughput: float  # conservative: rate-weighted sum of the OP half-widths


@dataclass(frozen=True)
class OutageReport:
    mechanisms: dict
    trials: int
    seed: int
    z: float


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, chunk_index]))


def sample_trial_arrays(scenario, rng: np.random.Generator, n: int) -> dict:
    """Draw one block-fading realization batch; fixed draw order per chunk."""
    links = build_links(scenario)
    out = {}

    weights, scales, shapes = g2g_mixture(links.sr_cf, links.pathloss_cf)
    k = rng.choice(weights.size, size=n, p=weights)
    out["phi_cf"] = rng.gamma(shapes[k], scales[k])

    for name, link, d in (
        ("phi_cu", links.link_cu, links.d_cu),
        ("phi_eu", links.link_eu, links.d_eu),
        ("phi_uf", links.link_uf, links.d_uf),
    ):
        los = rng.random(n) < link.p_los
        g_los, g_nlos = a2g_branch_gains(link, d)
        shape = np.where(los, link.m, 1)
        scale = np.where(los, g_los / link.m, g_nlos)
        out[name] = rng.gamma(shape, scale)

    for name, xi, mean in (
        ("res_cu", scenario.xi_u, links.mean_cu),
        ("res_cf", scenario.xi_f, links.mean_cf),
        ("res_uf", scenario.xi_f, links.mean_uf),
    ):
        if xi == 0.0:
            out[name] = np.zeros(n)
        else:
            out[name] = rng.exponential(xi * mean, size=n)
    return out


def _mechanism_modes(mechanism: str) -> tuple[int, int]:
    if mechanism == ADM:
        return _kernels.ADAPTIVE, _kernels.ADAPTIVE
    u, f = NADM_ORDERS[mechanism]
    return _MODE[u], _MODE[f]


def _run_chunk(scenario, powers, mechanisms, seed, chunk_index, n):
    rng = _chunk_rng(seed, chunk_index)
    arrs = sample_trial_arrays(scenario, rng, n)
    th = derive_thresholds(scenario, powers)
    tau_c, tau_e = th.tau_c, th.tau_e
    s2u, s2f = scenario.sigma2_u_w, scenario.sigma2_f_w
    p_c1, p_e, p_c2, p_u = powers.p_c1, powers.p_e, powers.p_c2, powers.p_u

    fail_c1 = int(np.sum(~(p_c1 * arrs["phi_cf"] > tau_c * s2f)))
    per_mech = {}
    for mech in mechanisms:
        um, fm = _mechanism_modes(mech)
        _, xe_ok, xc2_ok = _kernels.decode_trials(
            arrs["phi_cu"],
            arrs["phi_eu"],
            arrs["phi_uf"],
            arrs["phi_cf"],
            arrs["res_cu"],
            arrs["res_cf"],
            arrs["res_uf"],
            p_c1,
            p_e,
            p_c2,
            p_u,
            s2u,
            s2f,
            tau_c,
            tau_e,
            um,
            fm,
        )
        per_mech[mech] = (int(np.sum(~xe_ok)), int(np.sum(~xc2_ok)))
    return fail_c1, per_mech


def estimate(
    scenario,
    powers: PowerAllocation,
    mechanisms=(ADM,),
    config: MCConfig = MCConfig(),
) -> OutageReport:
    """Estimate the three outage probabilities and throughput per mechanism."""
    for mech in mechanisms:
        if mech not in MECHANISMS:
            raise ValueError(f"unknown mechanism {mech!r}")
    n = config.trials
    chunks = [(i, min(CHUNK, n - s)) for i, s in enumerate(range(0, n, CHUNK))]

    def work(item):
        idx, size = item
        return _run_chunk(scenario, powers, mechanisms, config.seed, idx, size)

    if config.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]

    fail_c1 = sum(r[0] for r in results)
    op_c1 = fail_c1 / n
    ci_c1 = config.z * np.sqrt(op_c1 * (1.0 - op_c1) / n)

    mech_out = {}
    for mech in mechanisms:
        fail_e = sum(r[1][mech][0] for r in results)
        fail_c2 = sum(r[1][mech][1] for r in results)
        op_e = fail_e / n
        op_c2 = fail_c2 / n
        ci_e = config.z * np.sqrt(op_e * (1.0 - op_e) / n)
        ci_c2 = config.z * np.sqrt(op_c2 * (1.0 - op_c2) / n)
        tput = throughput_from_ops(scenario.r_th_c, scenario.r_th_e, op_e, op_c1, op_c2)
        ci_t = 0.5 * scenario.r_th_c * (ci_c1 + ci_c2) + 0.5 * scenario.r_th_e * ci_e
        mech_out[mech] = MechanismEstimate(
            op_e=op_e,
            op_c1=op_c1,
            op_c2=op_c2,
            throughput=tput,
            ci_op_e=ci_e,
            ci_op_c1=ci_c1,
            ci_op_c2=ci_c2,
            ci_throughput=ci_t,
        )
    return OutageReport(mechanisms=mech_out, trials=n, seed=config.seed, z=config.z)
