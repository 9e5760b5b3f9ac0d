"""Vectorized numpy implementation of the per-trial decode logic.

Twin of the compiled kernel in `_decode_cy.pyx`; both consume the same
pre-drawn channel arrays and must produce bit-identical outputs. All SIC
threshold tests are written cross-multiplied (num > tau * den) so that
zero-power and zero-noise corners need no special casing and the two
implementations round identically.
"""

from __future__ import annotations

import numpy as np

ADAPTIVE = 0
FIRST_C = 1
FIRST_E = 2


def decode_trials(
    phi_cu,
    phi_eu,
    phi_uf,
    phi_cf,
    res_cu,
    res_cf,
    res_uf,
    p_c1,
    p_e,
    p_c2,
    p_u,
    sig2_u,
    sig2_f,
    tau_c,
    tau_e,
    uav_mode,
    fc_mode,
):
    """Decode one batch of trials under one decoding mechanism.

    Returns (xe_at_uav_ok, xe_ok, xc2_ok) boolean arrays: relay decodes
    the edge signal; fusion center decodes the forwarded edge signal;
    fusion center decodes the second-phase center signal.
    """
    n = phi_cu.shape[0]

    if uav_mode == ADAPTIVE:
        branch_ce = phi_cu >= phi_eu
    else:
        branch_ce = np.full(n, uav_mode == FIRST_C)

    # relay: SIC route decodes the center signal first, then the edge signal
    sic_c_ok = p_c1 * phi_cu > tau_c * (p_e * phi_eu + sig2_u)
    xe_sic = sic_c_ok & (p_e * phi_eu > tau_e * (p_c1 * res_cu + sig2_u))
    # relay: direct route treats the center signal as interference
    xe_direct = p_e * phi_eu > tau_e * (p_c1 * phi_cu + sig2_u)
    xe_at_uav = np.where(branch_ce, xe_sic, xe_direct)

    if fc_mode == ADAPTIVE:
        fc_cu = phi_cf >= phi_uf
    else:
        fc_cu = np.full(n, fc_mode == FIRST_C)

    # fusion center, relay active: center-first route
    xc2_first = p_c2 * phi_cf > tau_c * (p_u * phi_uf + sig2_f)
    xe_after_c = xc2_first & (p_u * phi_uf > tau_e * (p_c2 * res_cf + sig2_f))
    # fusion center, relay active: edge-first route
    xe_first = p_u * phi_uf > tau_e * (p_c2 * phi_cf + sig2_f)
    xc2_after_e = xe_first & (p_c2 * phi_cf > tau_c * (p_u * res_uf + sig2_f))

    xc2_active = np.where(fc_cu, xc2_first, xc2_after_e)
    xe_active = np.where(fc_cu, xe_after_c, xe_first)

    # silent relay: interference-free second-phase decode, edge signal lost
    xc2_silent = p_c2 * phi_cf > tau_c * sig2_f

    xc2_ok = np.where(xe_at_uav, xc2_active, xc2_silent)
    xe_ok = xe_at_uav & xe_active
    return xe_at_uav, xe_ok, xc2_ok
