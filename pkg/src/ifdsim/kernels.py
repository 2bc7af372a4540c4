"""Backend selection for the inner-loop kernels.

The compiled extension is preferred when present; the numpy fallback is
drop-in equivalent.  Set IFDSIM_PURE_PYTHON=1 to force the fallback
(used by the benchmark and by tests comparing the two).
"""

import os

from ifdsim import _kernels_py

if os.environ.get("IFDSIM_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from ifdsim import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

import numpy as np


def _as_c(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def _as_i(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def circulant_band_matvec(offsets, weights, x):
    return _impl.circulant_band_matvec(_as_i(offsets), _as_c(weights), _as_c(x))


def box_rhs_kernel(lap_offsets, lap_weights, edge_offsets, edge_weights, dprime, eta):
    return _impl.box_rhs_kernel(_as_i(lap_offsets), _as_c(lap_weights),
                                _as_i(edge_offsets), _as_c(edge_weights),
                                _as_c(dprime), float(eta))


def fd_rhs_kernel(u, dx, eta, advection=True):
    return _impl.fd_rhs_kernel(_as_c(u), float(dx), float(eta), bool(advection))
