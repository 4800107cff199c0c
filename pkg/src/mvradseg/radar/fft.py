"""Radix-2 FFT and the range/Doppler/angle processing chain.

The transform is implemented in-module (iterative decimation-in-time,
vectorised over all leading axes) so the whole signal path stays
self-contained and checkable against a direct DFT.
"""

from __future__ import annotations

import numpy as np

from ..engine.tensor import ConfigurationError
from .params import RadarParams, _is_pow2


def fft_radix2(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Forward FFT along ``axis``; the extent must be a power of two."""
    x = np.moveaxis(np.asarray(x, dtype=np.complex128), axis, -1)
    n = x.shape[-1]
    if not _is_pow2(n):
        raise ConfigurationError(f"fft_radix2 needs a power-of-two extent, got {n}")
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    out = x[..., rev]
    m = 1
    while m < n:
        w = np.exp(-1j * np.pi * np.arange(m) / m)
        v = out.reshape(out.shape[:-1] + (n // (2 * m), 2, m))
        even = v[..., 0, :]
        odd = v[..., 1, :] * w
        out = np.concatenate([even + odd, even - odd], axis=-1).reshape(x.shape)
        m *= 2
    return np.moveaxis(out, -1, axis)


def fftshift_axis(x: np.ndarray, axis: int) -> np.ndarray:
    """Move the zero-frequency bin to the centre of ``axis``."""
    return np.roll(x, x.shape[axis] // 2, axis=axis)


def fft_chain(adc: np.ndarray, params: RadarParams) -> np.ndarray:
    """Raw chirp cube -> complex range x angle x Doppler tensor.

    ``adc`` is (fast-time sample, chirp index, antenna index).  The chain is
    a range FFT over fast time, a Doppler FFT over the chirp sequence, and an
    angle FFT over the (zero-padded) antenna axis; Doppler and angle axes are
    shifted so zero velocity and boresight sit at the centre bins.
    """
    expected = (params.n_range, params.n_doppler)
    if adc.shape[:2] != expected or adc.shape[2] > params.n_angle:
        raise ConfigurationError(
            f"adc cube shape {adc.shape} incompatible with (n_range={params.n_range}, "
            f"n_doppler={params.n_doppler}, n_antennas<=n_angle={params.n_angle})")
    for extent in (params.n_range, params.n_doppler, params.n_angle):
        if not _is_pow2(extent):
            raise ConfigurationError(
                f"fft_chain requires power-of-two extents, got {extent}")
    spectrum = fft_radix2(adc, axis=0)
    spectrum = fftshift_axis(fft_radix2(spectrum, axis=1), axis=1)
    if adc.shape[2] < params.n_angle:
        pad = params.n_angle - adc.shape[2]
        spectrum = np.pad(spectrum, ((0, 0), (0, 0), (0, pad)))
    spectrum = fftshift_axis(fft_radix2(spectrum, axis=2), axis=2)
    return spectrum.transpose(0, 2, 1)
