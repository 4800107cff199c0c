"""Temporally stacked training samples and coherent multi-view flips."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..radar.views import ViewFrame
from .dataset import DatasetError, normalize_view

LAYOUT_CHANNELS = "channels"
LAYOUT_DEPTH = "depth"


@dataclass
class Sample:
    """Model input for one timestamp.

    Inputs stack the frames t-q..t: on the channel axis as (q+1, H, W) for
    the 2D models, or on a depth axis as (1, q+1, H, W) for the temporal
    model.  Targets are one-hot (K, H, W) masks at time t.  ``ad_in`` is
    None when the consuming model has no angle-Doppler branch.
    """

    rd_in: np.ndarray
    ra_in: np.ndarray
    ad_in: np.ndarray | None
    rd_target: np.ndarray
    ra_target: np.ndarray
    seq: str = ""
    t: int = 0


def one_hot(mask: np.ndarray, n_classes: int, dtype=np.float32) -> np.ndarray:
    """(H, W) class indices -> (K, H, W) with exactly one 1 per bin."""
    out = np.zeros((n_classes,) + mask.shape, dtype=dtype)
    for k in range(n_classes):
        out[k] = mask == k
    return out


def stack_sample(frames: list[ViewFrame], t: int, q: int,
                 stats: dict[str, tuple[float, float]], n_classes: int,
                 layout: str = LAYOUT_CHANNELS, with_ad: bool = True,
                 dtype=np.float32) -> Sample:
    """Assemble the normalised input stack and one-hot targets at time t."""
    if t < q:
        raise DatasetError(f"t={t} has no q={q} history; sequence starts are skipped")
    if t >= len(frames):
        raise DatasetError(f"t={t} beyond sequence of {len(frames)} frames")
    window = frames[t - q:t + 1]

    def stack(view: str) -> np.ndarray:
        lo, hi = stats[view]
        arrs = [normalize_view(getattr(f, view).astype(dtype), lo, hi)
                for f in window]
        stacked = np.stack(arrs, axis=0)
        if layout == LAYOUT_DEPTH:
            return stacked[None]
        if layout == LAYOUT_CHANNELS:
            return stacked
        raise DatasetError(f"unknown layout {layout!r}")

    target_frame = frames[t]
    return Sample(
        rd_in=stack("rd"),
        ra_in=stack("ra"),
        ad_in=stack("ad") if with_ad else None,
        rd_target=one_hot(target_frame.rd_mask, n_classes, dtype),
        ra_target=one_hot(target_frame.ra_mask, n_classes, dtype),
        t=t,
    )


def augment_flip(sample: Sample, rng: np.random.Generator) -> Sample:
    """Three independent coin flips, applied coherently across views.

    Range flips RD and RA (inputs and targets) together; Doppler flips the
    RD and AD inputs and the RD target; angle flips the RA and AD inputs and
    the RA target.  The AD view has no range axis, so the range flip leaves
    it untouched.  Inputs and targets always flip together, which preserves
    per-class bin counts and the shared range support of the two masks.
    """
    flip_range = rng.random() < 0.5
    flip_doppler = rng.random() < 0.5
    flip_angle = rng.random() < 0.5

    def flip(arr, axis):
        return np.ascontiguousarray(np.flip(arr, axis=axis))

    rd_in, ra_in, ad_in = sample.rd_in, sample.ra_in, sample.ad_in
    rd_t, ra_t = sample.rd_target, sample.ra_target
    if flip_range:
        rd_in, ra_in = flip(rd_in, -2), flip(ra_in, -2)
        rd_t, ra_t = flip(rd_t, -2), flip(ra_t, -2)
    if flip_doppler:
        rd_in, rd_t = flip(rd_in, -1), flip(rd_t, -1)
        if ad_in is not None:
            ad_in = flip(ad_in, -1)
    if flip_angle:
        ra_in, ra_t = flip(ra_in, -1), flip(ra_t, -1)
        if ad_in is not None:
            ad_in = flip(ad_in, -2)
    return replace(sample, rd_in=rd_in, ra_in=ra_in, ad_in=ad_in,
                   rd_target=rd_t, ra_target=ra_t)


def batch_samples(samples: list[Sample]) -> dict[str, np.ndarray | None]:
    """Stack samples into batched arrays (leading batch axis)."""
    if not samples:
        raise DatasetError("cannot batch zero samples")
    has_ad = samples[0].ad_in is not None
    return {
        "rd_in": np.stack([s.rd_in for s in samples]),
        "ra_in": np.stack([s.ra_in for s in samples]),
        "ad_in": np.stack([s.ad_in for s in samples]) if has_ad else None,
        "rd_target": np.stack([s.rd_target for s in samples]),
        "ra_target": np.stack([s.ra_target for s in samples]),
    }
