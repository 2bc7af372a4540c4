"""Pure-numpy implementations of the inner-loop kernels.

Mirrors the signatures of the compiled extension ifdsim._kernels; the
dispatcher in ifdsim.kernels picks whichever is available.
"""

import numpy as np


def circulant_band_matvec(offsets, weights, x):
    """out_i = sum_t weights[t] * x[(i - offsets[t]) mod n]."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for off, w in zip(offsets, weights):
        out += w * np.roll(x, off)
    return out


def box_rhs_kernel(lap_offsets, lap_weights, edge_offsets, edge_weights,
                   dprime, eta):
    """Box-grid rhs from the solved data vector d'.

    Diffusion is the banded stencil applied to d' scaled by eta; advection
    is minus half the difference of the squared edge bracket between the
    right and left edge of each box.
    """
    lap = circulant_band_matvec(lap_offsets, lap_weights, dprime)
    g = circulant_band_matvec(edge_offsets, edge_weights, dprime)
    g2 = g * g
    return eta * lap - 0.5 * (np.roll(g2, -1) - g2)


def fd_rhs_kernel(u, dx, eta, advection):
    """Central-difference Burgers rhs on a periodic point grid."""
    u = np.asarray(u, dtype=float)
    up = np.roll(u, -1)
    um = np.roll(u, 1)
    out = eta * (up - 2.0 * u + um) / (dx * dx)
    if advection:
        out -= u * (up - um) / (2.0 * dx)
    return out
