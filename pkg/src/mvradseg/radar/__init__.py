"""Synthetic FMCW radar: chirp synthesis, FFT chain, views and scenarios."""

from .params import (
    CLASS_NAMES,
    N_CLASSES,
    CoverageError,
    PointTarget,
    RadarParams,
    TargetClass,
)
from .fft import fft_chain, fft_radix2, fftshift_axis
from .synth import apply_speckle, synthesize_adc
from .views import LOG_FLOOR, ViewFrame, aggregate_views, render_masks
from .scene import TargetTrack, random_scenario, simulate_sequence

__all__ = [
    "CLASS_NAMES",
    "CoverageError",
    "LOG_FLOOR",
    "N_CLASSES",
    "PointTarget",
    "RadarParams",
    "TargetClass",
    "TargetTrack",
    "ViewFrame",
    "aggregate_views",
    "apply_speckle",
    "fft_chain",
    "fft_radix2",
    "fftshift_axis",
    "random_scenario",
    "render_masks",
    "simulate_sequence",
    "synthesize_adc",
]
