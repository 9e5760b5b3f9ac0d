"""Decode-kernel selection: compiled extension when available, numpy otherwise.

Set UAVNOMA_PURE_PYTHON=1 to force the numpy path (used by the benchmark
and by tests that compare the two implementations).
"""

from __future__ import annotations

import os

from . import _decode_np

if os.environ.get("UAVNOMA_PURE_PYTHON") == "1":
    decode_trials = _decode_np.decode_trials
    BACKEND = "numpy"
else:
    try:
        from . import _decode_cy

        decode_trials = _decode_cy.decode_trials
        BACKEND = "cython"
    except ImportError:
        decode_trials = _decode_np.decode_trials
        BACKEND = "numpy"

ADAPTIVE = _decode_np.ADAPTIVE
FIRST_C = _decode_np.FIRST_C
FIRST_E = _decode_np.FIRST_E
