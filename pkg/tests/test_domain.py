import numpy as np
import pytest

from ifdsim.domain import (FineField, PeriodicDomain, SpectralField,
                           circular_convolve, dft, hermitian_residual, idft,
                           pad_modes, resample, truncate_modes)
from ifdsim.errors import NonHermitianInput

from conftest import random_hermitian_modes

L = 64.0


def make_field(samples):
    samples = np.asarray(samples, dtype=float)
    dom = PeriodicDomain(L, len(samples), 1)
    return FineField(samples, dom)


def test_domain_validation():
    with pytest.raises(ValueError):
        PeriodicDomain(-1.0, 64)
    with pytest.raises(ValueError):
        PeriodicDomain(L, 3)
    with pytest.raises(ValueError):
        PeriodicDomain(L, 64, 0)


def test_constant_field_only_zero_mode():
    c = 3.7
    spec = dft(make_field(np.full(64, c)))
    assert abs(spec.modes[0] - c) < 1e-14 * abs(c)
    assert np.max(np.abs(spec.modes[1:])) < 1e-14 * abs(c)


@pytest.mark.parametrize("n", [16, 64, 128, 1024])
def test_round_trip(n, rng):
    f = make_field(rng.standard_normal(n))
    back = idft(dft(f))
    assert np.linalg.norm(back.samples - f.samples) < 1e-12 * np.linalg.norm(f.samples)
    spec = dft(f)
    again = dft(idft(spec))
    assert np.linalg.norm(again.modes - spec.modes) < 1e-12 * np.linalg.norm(spec.modes)


def test_single_cosine_two_conjugate_modes():
    n = 64
    dom = PeriodicDomain(L, n, 1)
    x = dom.fine_x()
    k1 = 2 * np.pi / L
    spec = dft(FineField(np.cos(k1 * x), dom))
    mags = np.abs(spec.modes)
    assert abs(mags[1] - 0.5) < 1e-14
    assert abs(mags[-1] - 0.5) < 1e-14
    assert spec.modes[1] == pytest.approx(np.conj(spec.modes[-1]), abs=1e-15)
    rest = np.delete(mags, [1, n - 1])
    assert np.max(rest) < 1e-14


def test_idft_zero_and_constant():
    dom = PeriodicDomain(L, 8, 1)
    zero = idft(SpectralField(np.zeros(8, complex), dom))
    assert np.all(zero.samples == 0.0)
    m = np.zeros(8, complex)
    m[0] = 2.5  # k=0 mode of value c gives the constant field c
    const = idft(SpectralField(m, dom))
    assert np.allclose(const.samples, 2.5, rtol=0, atol=1e-14)


def test_idft_rejects_non_hermitian(rng):
    dom = PeriodicDomain(L, 8, 1)
    modes = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    with pytest.raises(NonHermitianInput):
        idft(SpectralField(modes, dom))


@pytest.mark.parametrize("n", [16, 64, 256])
def test_parseval(n, rng):
    f = make_field(rng.standard_normal(n))
    spec = dft(f)
    h = L / n
    field_energy = np.sum(f.samples ** 2) * h
    spectral_energy = L * np.sum(np.abs(spec.modes) ** 2)
    assert abs(field_energy - spectral_energy) < 1e-10 * field_energy


@pytest.mark.parametrize("dealias", [False, True])
def test_convolve_delta_identity(dealias, rng):
    n = 32
    dom = PeriodicDomain(L, n, 1)
    a = SpectralField(random_hermitian_modes(rng, n), dom)
    delta = np.zeros(n, complex)
    delta[0] = 1.0
    out = circular_convolve(a, SpectralField(delta, dom), dealias=dealias)
    assert np.linalg.norm(out.modes - a.modes) < 1e-14 * np.linalg.norm(a.modes)


def test_convolve_single_mode_doubles_wavenumber():
    n = 16
    dom = PeriodicDomain(L, n, 1)
    m = np.zeros(n, complex)
    m[3] = 1.0
    out = circular_convolve(SpectralField(m, dom), SpectralField(m, dom),
                            dealias=True)
    expected = np.zeros(n, complex)
    expected[6] = 1.0
    assert np.linalg.norm(out.modes - expected) < 1e-13


def test_convolve_out_of_band_product_dropped_when_dealiased():
    n = 16
    dom = PeriodicDomain(L, n, 1)
    m = np.zeros(n, complex)
    m[5] = 1.0  # squared lands at 10 = out of the retained band
    dealiased = circular_convolve(SpectralField(m, dom), SpectralField(m, dom),
                                  dealias=True)
    assert np.max(np.abs(dealiased.modes)) < 1e-13
    cyclic = circular_convolve(SpectralField(m, dom), SpectralField(m, dom),
                               dealias=False)
    assert abs(cyclic.modes[10] - 1.0) < 1e-13  # wraps around instead


def test_dealiased_convolve_matches_fine_grid_product_oracle(rng):
    # Oracle: evaluate both band-limited fields on a 4x finer grid with
    # explicit exponential sums (no fft), multiply pointwise, project the
    # product back onto the band mode by mode.
    n = 64
    p = 4 * n
    dom = PeriodicDomain(L, n, 1)
    a = random_hermitian_modes(rng, n)
    b = random_hermitian_modes(rng, n)

    x = np.arange(p) * (L / p)
    k = 2 * np.pi * np.fft.fftfreq(n) * n / L
    basis = np.exp(-1j * np.outer(x, k))  # samples = basis @ modes
    fa = (basis @ a).real
    fb = (basis @ b).real
    product = fa * fb
    proj = np.exp(1j * np.outer(k, x)) @ product / p

    out = circular_convolve(SpectralField(a, dom), SpectralField(b, dom),
                            dealias=True).modes
    keep = np.abs(np.fft.fftfreq(n) * n) < n // 2  # compare away from Nyquist
    err = np.linalg.norm(out[keep] - proj[keep]) / np.linalg.norm(proj[keep])
    assert err < 1e-10


def test_dealiased_convolve_preserves_hermitian_symmetry(rng):
    n = 64
    dom = PeriodicDomain(L, n, 1)
    a = SpectralField(random_hermitian_modes(rng, n), dom)
    b = SpectralField(random_hermitian_modes(rng, n), dom)
    out = circular_convolve(a, b, dealias=True)
    assert hermitian_residual(out.modes) < 1e-13


def test_pad_truncate_round_trip(rng):
    for n in (16, 17):
        m = random_hermitian_modes(rng, n, zero_nyquist=False)
        back = truncate_modes(pad_modes(m, 2 * n + 5 - (n % 2)), n)
        assert np.linalg.norm(back - m) < 1e-14 * np.linalg.norm(m)


def test_resample_round_trip(rng):
    s = np.fft.fft(random_hermitian_modes(rng, 64)).real
    up = resample(s, 256)
    back = resample(up, 64)
    assert np.linalg.norm(back - s) < 1e-12 * np.linalg.norm(s)
    assert np.linalg.norm(up[::4] - s) < 1e-12 * np.linalg.norm(s)
