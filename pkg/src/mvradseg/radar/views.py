"""Decibel-scale 2D views of the radar cube and synthetic ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PointTarget, RadarParams

LOG_FLOOR = 1e-12


@dataclass
class ViewFrame:
    """The three dB views of one cube plus per-bin class masks.

    ``rd`` is range x Doppler, ``ad`` angle x Doppler, ``ra`` range x angle.
    Masks carry class indices with 0 = background; the AD view is input-only
    and unannotated.
    """

    rd: np.ndarray
    ad: np.ndarray
    ra: np.ndarray
    rd_mask: np.ndarray
    ra_mask: np.ndarray
    index: int = 0

    def __post_init__(self):
        if self.rd_mask.shape != self.rd.shape:
            raise ValueError(f"rd_mask {self.rd_mask.shape} != rd {self.rd.shape}")
        if self.ra_mask.shape != self.ra.shape:
            raise ValueError(f"ra_mask {self.ra_mask.shape} != ra {self.ra.shape}")


def aggregate_views(rad: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mean squared modulus over the absent axis, in decibels.

    Given the (range, angle, Doppler) cube, returns (rd, ad, ra):
    RD averages over angle, AD over range, RA over Doppler.  A floor inside
    the log keeps empty bins finite.
    """
    power = np.abs(rad) ** 2
    rd = 10.0 * np.log10(np.maximum(power.mean(axis=1), LOG_FLOOR))
    ad = 10.0 * np.log10(np.maximum(power.mean(axis=0), LOG_FLOOR))
    ra = 10.0 * np.log10(np.maximum(power.mean(axis=2), LOG_FLOOR))
    return rd, ad, ra


def _paint(mask: np.ndarray, row_center: float, row_half: float,
           col_center: float, col_half: float, value: int) -> None:
    """Fill an axis-aligned elliptical region, at least one bin thick per row.

    The minimum half-bin column width guarantees every row inside the range
    footprint receives a bin, so the RD and RA masks of one target always
    share the same set of occupied range rows.
    """
    n_rows, n_cols = mask.shape
    lo = max(0, int(np.ceil(row_center - row_half)))
    hi = min(n_rows - 1, int(np.floor(row_center + row_half)))
    for row in range(lo, hi + 1):
        rel = (row - row_center) / row_half
        half = col_half * np.sqrt(max(0.0, 1.0 - rel * rel))
        half = max(half, 0.5)
        c_lo = max(0, int(np.ceil(col_center - half)))
        c_hi = min(n_cols - 1, int(np.floor(col_center + half)))
        if c_lo <= c_hi:
            mask[row, c_lo:c_hi + 1] = value


def render_masks(params: RadarParams,
                 targets: list[PointTarget]) -> tuple[np.ndarray, np.ndarray]:
    """Paint each target's class on elliptical regions of the RD and RA grids.

    Later targets in list order overwrite earlier ones; regions are clipped
    to the grid.
    """
    rd_mask = np.zeros((params.n_range, params.n_doppler), dtype=np.uint8)
    ra_mask = np.zeros((params.n_range, params.n_angle), dtype=np.uint8)
    for target in targets:
        br = params.range_bin(target.range)
        bd = params.doppler_bin(target.velocity)
        ba = params.angle_bin(target.angle)
        er, ea, ed = target.extent
        _paint(rd_mask, br, er, bd, ed, int(target.class_id))
        _paint(ra_mask, br, er, ba, ea, int(target.class_id))
    return rd_mask, ra_mask
