"""Periodic 1-D domain bookkeeping and discrete Fourier machinery.

Transform convention (used by every module in the package; there is no
second transform implementation):

    dft:   modes[j]   = (1/M) * sum_n samples[n] * exp(+i k_j x_n)
    idft:  samples[n] =         sum_j modes[j]   * exp(-i k_j x_n)

with k_j = 2*pi*j/L for signed mode index j in numpy fft bin order and
x_n = n*L/M.  Under this convention a pointwise product of two fields is
the plain index convolution of their mode vectors, the k=0 mode of a
field equals its mean value, and Parseval reads

    sum_n samples[n]**2 * (L/M)  ==  L * sum_j |modes[j]|**2 .

Spatial derivatives multiply modes by (-i k_j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ifdsim.errors import NonHermitianInput

HERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class PeriodicDomain:
    """Simulation interval [0, L) split into n_cells uniform boxes.

    fine_factor sets the samples-per-box density of the fine grid used
    for reconstructions and reference solutions.
    """

    length: float
    n_cells: int
    fine_factor: int = 1

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if self.n_cells < 4:
            raise ValueError(f"n_cells must be >= 4, got {self.n_cells}")
        if self.fine_factor < 1:
            raise ValueError(f"fine_factor must be >= 1, got {self.fine_factor}")

    @property
    def cell_width(self) -> float:
        return self.length / self.n_cells

    @property
    def n_fine(self) -> int:
        return self.n_cells * self.fine_factor

    @property
    def fine_spacing(self) -> float:
        return self.length / self.n_fine

    def fine_x(self) -> np.ndarray:
        """Fine grid positions x_n = n*L/M (endpoint-aligned, no duplicate)."""
        return np.arange(self.n_fine) * self.fine_spacing

    def box_edges(self) -> np.ndarray:
        """The n_cells+1 box edge positions including both endpoints."""
        return np.arange(self.n_cells + 1) * self.cell_width

    def wavenumbers(self, m: int | None = None) -> np.ndarray:
        """k_j = 2*pi*j/L in fft bin order for a transform of size m."""
        m = self.n_fine if m is None else m
        return 2.0 * np.pi * np.fft.fftfreq(m) * m / self.length

    def with_fine_factor(self, fine_factor: int) -> "PeriodicDomain":
        return PeriodicDomain(self.length, self.n_cells, fine_factor)

    def with_cells(self, n_cells: int, fine_factor: int | None = None) -> "PeriodicDomain":
        return PeriodicDomain(self.length, n_cells,
                              self.fine_factor if fine_factor is None else fine_factor)


@dataclass(frozen=True)
class FineField:
    """A densely sampled real field on the domain's fine grid."""

    samples: np.ndarray
    domain: PeriodicDomain

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.samples.shape != (self.domain.n_fine,):
            raise ValueError(
                f"field length {self.samples.shape} does not match the "
                f"domain fine grid ({self.domain.n_fine},)")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("field samples must be finite")


@dataclass(frozen=True)
class SpectralField:
    """Complex mode vector in fft bin order over wavenumbers 2*pi*j/L."""

    modes: np.ndarray
    domain: PeriodicDomain

    def __post_init__(self):
        object.__setattr__(self, "modes", np.asarray(self.modes, dtype=complex))
        if self.modes.ndim != 1:
            raise ValueError("modes must be a 1-D vector")

    def wavenumbers(self) -> np.ndarray:
        return self.domain.wavenumbers(len(self.modes))


def _field_domain(domain: PeriodicDomain, size: int) -> PeriodicDomain:
    if size % domain.n_cells != 0:
        raise ValueError(
            f"grid size {size} is not a multiple of n_cells={domain.n_cells}")
    return domain.with_fine_factor(size // domain.n_cells)


def dft(f: FineField) -> SpectralField:
    """Forward transform of a fine field (see module header for convention)."""
    return SpectralField(np.fft.ifft(f.samples), f.domain)


def idft(spec: SpectralField) -> FineField:
    """Inverse transform; raises NonHermitianInput when the result is not real.

    The imaginary residue must stay below HERMITIAN_TOL relative to the
    output norm.
    """
    full = np.fft.fft(spec.modes)
    norm = np.linalg.norm(full)
    if norm > 0 and np.linalg.norm(full.imag) > HERMITIAN_TOL * norm:
        raise NonHermitianInput(
            "modes are not Hermitian-symmetric: imaginary residue "
            f"{np.linalg.norm(full.imag) / norm:.3e} of output norm")
    return FineField(full.real, _field_domain(spec.domain, len(spec.modes)))


def hermitian_residual(modes: np.ndarray) -> float:
    """Relative deviation of a mode vector from Hermitian symmetry."""
    modes = np.asarray(modes, dtype=complex)
    norm = np.linalg.norm(modes)
    if norm == 0:
        return 0.0
    idx = (-np.arange(len(modes))) % len(modes)
    return float(np.linalg.norm(modes - np.conj(modes[idx])) / norm)


def pad_modes(modes: np.ndarray, size: int) -> np.ndarray:
    """Zero-pad a mode vector to a larger transform size.

    An even-length Nyquist coefficient is split in half between the two
    bins it unfolds into, so real fields upsample exactly.
    """
    m = len(modes)
    if size < m:
        raise ValueError("pad target smaller than input")
    if size == m:
        return modes.copy()
    out = np.zeros(size, dtype=complex)
    h = m // 2
    if m % 2 == 0:
        out[:h] = modes[:h]
        out[size - h + 1:] = modes[h + 1:]
        out[h] = 0.5 * modes[h]
        out[size - h] = 0.5 * modes[h]
    else:
        out[:h + 1] = modes[:h + 1]
        out[size - h:] = modes[h + 1:]
    return out


def truncate_modes(modes: np.ndarray, size: int) -> np.ndarray:
    """Restrict a mode vector to a smaller transform size (adjoint of pad).

    For even target size the two bins that alias onto the single Nyquist
    slot are folded together, which matches restriction by sampling.
    """
    p = len(modes)
    if size > p:
        raise ValueError("truncate target larger than input")
    if size == p:
        return modes.copy()
    out = np.zeros(size, dtype=complex)
    h = size // 2
    if size % 2 == 0:
        out[:h] = modes[:h]
        out[h + 1:] = modes[p - h + 1:]
        out[h] = modes[h] + modes[p - h]
    else:
        out[:h + 1] = modes[:h + 1]
        out[h + 1:] = modes[p - h:]
    return out


def convolve_modes(a: np.ndarray, b: np.ndarray, dealias: bool = False) -> np.ndarray:
    """Index convolution c_i = sum_j a_{i-j} b_j of two mode vectors.

    Without dealiasing the index arithmetic is cyclic.  With dealiasing
    the product is evaluated on a zero-padded band of twice the width
    (>= the 3/2 rule), so quadratic products of retained modes cannot
    fold back into the band; the result equals the mode vector of the
    pointwise product field.
    """
    if len(a) != len(b):
        raise ValueError("mode vectors must have equal length")
    m = len(a)
    if not dealias:
        return np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))
    p = 2 * m
    prod = np.fft.ifft(np.fft.fft(pad_modes(a, p)) * np.fft.fft(pad_modes(b, p)))
    return truncate_modes(prod, m)


def circular_convolve(a: SpectralField, b: SpectralField, dealias: bool = False) -> SpectralField:
    """Typed wrapper around convolve_modes for equal-band spectral fields."""
    if len(a.modes) != len(b.modes):
        raise ValueError("spectral fields must have equal band size")
    return SpectralField(convolve_modes(a.modes, b.modes, dealias=dealias), a.domain)


def resample(samples: np.ndarray, size: int) -> np.ndarray:
    """Spectral (trigonometric) resampling of real periodic samples."""
    modes = np.fft.ifft(np.asarray(samples, dtype=float))
    if size >= len(samples):
        modes = pad_modes(modes, size)
    else:
        modes = truncate_modes(modes, size)
    return np.fft.fft(modes).real
