"""Kernel backend selection.

Set CLUSTERSIM_BACKEND=numpy to force the vectorized numpy path, or =numba to
require the jit path (import fails if numba is unavailable). Unset, the jit
path is preferred and numpy is the fallback.
"""

import os

import numpy as np

_requested = os.environ.get("CLUSTERSIM_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        "CLUSTERSIM_BACKEND must be 'numba' or 'numpy', got %r" % _requested
    )

if _requested == "numpy":
    from . import _kernels_numpy as _impl

    _active = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        _active = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _kernels_numpy as _impl

        _active = "numpy"

apply_1q = _impl.apply_1q
apply_cnot = _impl.apply_cnot
project_single = _impl.project_single
project_pair = _impl.project_pair


def active_backend():
    """Name of the backend picked at import time ('numba' or 'numpy')."""
    return _active


def warmup():
    """Run every kernel once on a tiny state so jit compilation happens now."""
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = 1.0
    ident = np.eye(2, dtype=np.complex128)
    bra2 = np.array([1.0, 0.0], dtype=np.complex128)
    bra4 = np.array([1.0, 0.0, 0.0, 0.0], dtype=np.complex128)
    apply_1q(amps, 2, 0, ident)
    apply_cnot(amps, 2, 0, 1)
    project_single(amps, 2, 0, bra2)
    project_pair(amps, 2, 0, 1, bra4)
