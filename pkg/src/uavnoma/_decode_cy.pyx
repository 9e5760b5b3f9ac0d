# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled decode kernel: one pass over the trial arrays per mechanism.

Mirrors `_decode_np.decode_trials`; the branchy per-trial logic fuses into
a single nogil loop with no temporaries. Comparisons are cross-multiplied
exactly as in the numpy twin so both produce bit-identical outputs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ADAPTIVE = 0
FIRST_C = 1
FIRST_E = 2


def decode_trials(
    cnp.ndarray[cnp.float64_t, ndim=1] phi_cu,
    cnp.ndarray[cnp.float64_t, ndim=1] phi_eu,
    cnp.ndarray[cnp.float64_t, ndim=1] phi_uf,
    cnp.ndarray[cnp.float64_t, ndim=1] phi_cf,
    cnp.ndarray[cnp.float64_t, ndim=1] res_cu,
    cnp.ndarray[cnp.float64_t, ndim=1] res_cf,
    cnp.ndarray[cnp.float64_t, ndim=1] res_uf,
    double p_c1,
    double p_e,
    double p_c2,
    double p_u,
    double sig2_u,
    double sig2_f,
    double tau_c,
    double tau_e,
    int uav_mode,
    int fc_mode,
):
    cdef Py_ssize_t n = phi_cu.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] xe_at_uav = np.empty(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] xe_ok = np.empty(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] xc2_ok = np.empty(n, dtype=np.uint8)

    cdef double[:] cu = phi_cu
    cdef double[:] eu = phi_eu
    cdef double[:] uf = phi_uf
    cdef double[:] cf = phi_cf
    cdef double[:] rcu = res_cu
    cdef double[:] rcf = res_cf
    cdef double[:] ruf = res_uf
    cdef cnp.uint8_t[:] out_u = xe_at_uav
    cdef cnp.uint8_t[:] out_e = xe_ok
    cdef cnp.uint8_t[:] out_c = xc2_ok

    cdef Py_ssize_t i
    cdef bint branch_ce, fc_cu, xe_u, xe_f, xc2
    with nogil:
        for i in range(n):
            if uav_mode == 0:
                branch_ce = cu[i] >= eu[i]
            else:
                branch_ce = uav_mode == 1
            if branch_ce:
                xe_u = (p_c1 * cu[i] > tau_c * (p_e * eu[i] + sig2_u)) and (
                    p_e * eu[i] > tau_e * (p_c1 * rcu[i] + sig2_u)
                )
            else:
                xe_u = p_e * eu[i] > tau_e * (p_c1 * cu[i] + sig2_u)

            if xe_u:
                if fc_mode == 0:
                    fc_cu = cf[i] >= uf[i]
                else:
                    fc_cu = fc_mode == 1
                if fc_cu:
                    xc2 = p_c2 * cf[i] > tau_c * (p_u * uf[i] + sig2_f)
                    xe_f = xc2 and (p_u * uf[i] > tau_e * (p_c2 * rcf[i] + sig2_f))
                else:
                    xe_f = p_u * uf[i] > tau_e * (p_c2 * cf[i] + sig2_f)
                    xc2 = xe_f and (p_c2 * cf[i] > tau_c * (p_u * ruf[i] + sig2_f))
            else:
                xe_f = False
                xc2 = p_c2 * cf[i] > tau_c * sig2_f

            out_u[i] = xe_u
            out_e[i] = xe_f
            out_c[i] = xc2

    return (
        xe_at_uav.view(np.bool_),
        xe_ok.view(np.bool_),
        xc2_ok.view(np.bool_),
    )
