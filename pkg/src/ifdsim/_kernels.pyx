# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner-loop kernels (banded circulant apply, scheme right-hand sides).

Semantics match ifdsim._kernels_py exactly; see that module for the
reference implementations.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def circulant_band_matvec(cnp.int64_t[::1] offsets, double[::1] weights,
                          double[::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t nb = offsets.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, t, idx
    cdef double acc
    for i in range(n):
        acc = 0.0
        for t in range(nb):
            idx = i - offsets[t]
            if idx < 0:
                idx += n
            elif idx >= n:
                idx -= n
            acc += weights[t] * x[idx]
        out[i] = acc
    return out_arr


def box_rhs_kernel(cnp.int64_t[::1] lap_offsets, double[::1] lap_weights,
                   cnp.int64_t[::1] edge_offsets, double[::1] edge_weights,
                   double[::1] dprime, double eta):
    cdef Py_ssize_t n = dprime.shape[0]
    cdef Py_ssize_t nl = lap_offsets.shape[0]
    cdef Py_ssize_t ne = edge_offsets.shape[0]
    g_arr = np.empty(n, dtype=np.float64)
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] g = g_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, t, idx
    cdef double acc, gr, gl
    for i in range(n):
        acc = 0.0
        for t in range(ne):
            idx = i - edge_offsets[t]
            if idx < 0:
                idx += n
            elif idx >= n:
                idx -= n
            acc += edge_weights[t] * dprime[idx]
        g[i] = acc
    for i in range(n):
        acc = 0.0
        for t in range(nl):
            idx = i - lap_offsets[t]
            if idx < 0:
                idx += n
            elif idx >= n:
                idx -= n
            acc += lap_weights[t] * dprime[idx]
        gr = g[i + 1] if i + 1 < n else g[0]
        gl = g[i]
        out[i] = eta * acc - 0.5 * (gr * gr - gl * gl)
    return out_arr


def fd_rhs_kernel(double[::1] u, double dx, double eta, bint advection):
    cdef Py_ssize_t n = u.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double up, um
    cdef double inv2 = 1.0 / (dx * dx)
    cdef double invc = 1.0 / (2.0 * dx)
    for i in range(n):
        up = u[i + 1] if i + 1 < n else u[0]
        um = u[i - 1] if i > 0 else u[n - 1]
        out[i] = eta * (up - 2.0 * u[i] + um) * inv2
        if advection:
            out[i] -= u[i] * (up - um) * invc
    return out_arr
