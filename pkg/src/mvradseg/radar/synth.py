"""Chirp-domain synthesis of point targets and multiplicative speckle."""

from __future__ import annotations

import numpy as np

from .params import PointTarget, RadarParams


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _scatterers(params: RadarParams, target: PointTarget):
    """Decompose one target into coherent sub-scatterers spanning its extent.

    Yields (range_bin, angle_bin, doppler_bin, amplitude).  A point target
    (all extents == 1) stays a single scatterer, so peak-location checks see
    a pure tone.
    """
    br = params.range_bin(target.range)
    ba = params.angle_bin(target.angle)
    bd = params.doppler_bin(target.velocity)
    amp = float(np.sqrt(target.rcs))
    yield br, ba, bd, amp
    er, ea, ed = target.extent
    for axis, half in enumerate((er, ea, ed)):
        if half <= 1.0:
            continue
        for sign in (-1.0, 1.0):
            offset = sign * 0.7 * (half - 1.0)
            pos = [br, ba, bd]
            pos[axis] += offset
            yield pos[0], pos[1], pos[2], 0.5 * amp


def synthesize_adc(params: RadarParams, targets: list[PointTarget],
                   seed=0) -> np.ndarray:
    """Sum of per-target complex sinusoid products plus white noise.

    Returns the raw (fast-time, chirp, antenna) cube.  Frequencies along the
    three axes encode range, radial speed and azimuth through the linear bin
    mappings of :class:`RadarParams`.  Targets outside coverage are rejected.
    """
    rng = _as_rng(seed)
    shape = (params.n_range, params.n_doppler, params.n_antennas)
    cube = np.zeros(shape, dtype=np.complex128)
    fast = np.arange(params.n_range)
    chirps = np.arange(params.n_doppler)
    ants = np.arange(params.n_antennas)
    for target in targets:
        params.check_coverage(target)
        for br, ba, bd, amp in _scatterers(params, target):
            f_r = br / params.n_range
            f_d = (bd - params.n_doppler / 2) / params.n_doppler
            f_a = (ba - params.n_angle / 2) / params.n_angle
            tone_r = np.exp(2j * np.pi * f_r * fast)
            tone_d = np.exp(2j * np.pi * f_d * chirps)
            tone_a = np.exp(2j * np.pi * f_a * ants)
            cube += amp * tone_r[:, None, None] * tone_d[None, :, None] * tone_a[None, None, :]
    if params.noise_db is not None:
        sigma = 10.0 ** (params.noise_db / 20.0) / np.sqrt(2.0)
        cube += sigma * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return cube


def apply_speckle(rad: np.ndarray, seed=0) -> np.ndarray:
    """Fully developed speckle: unit-mean exponential intensity, random phase.

    Each bin's intensity is multiplied by an i.i.d. Exp(1) draw and its phase
    replaced by a uniform one, so the expected intensity is unchanged and a
    zero input stays zero.
    """
    rng = _as_rng(seed)
    magnitude = np.abs(rad)
    intensity_gain = rng.exponential(1.0, size=rad.shape)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=rad.shape)
    return magnitude * np.sqrt(intensity_gain) * np.exp(1j * phase)
