"""Radar configuration, point targets and the physical-to-bin mappings.

The chirp parameterisation is chosen so every mapping is linear and
invertible:

* range r (m)          -> fast-time frequency r / max_range cycles per cube,
                          i.e. range bin  b_r = r / max_range * n_range
* radial speed v (m/s) -> per-chirp phase step v / (2 max_speed), centred by
                          the Doppler FFT shift:  b_d = n_doppler/2 + v / max_speed * n_doppler/2
* azimuth theta (rad)  -> per-antenna phase step sin(theta)/2 (half-wavelength
                          array), centred:       b_a = n_angle/2 + sin(theta) * n_angle/2

Bins are real-valued; targets between grid points leak into neighbours as
usual for windowed FFTs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum


class TargetClass(IntEnum):
    BACKGROUND = 0
    PEDESTRIAN = 1
    CYCLIST = 2
    CAR = 3


CLASS_NAMES = ("background", "pedestrian", "cyclist", "car")
N_CLASSES = len(CLASS_NAMES)


class CoverageError(ValueError):
    """A target lies outside the radar's unambiguous measurement volume."""


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class RadarParams:
    """Bin counts and physical coverage of the simulated FMCW sensor."""

    n_range: int = 256
    n_angle: int = 256
    n_doppler: int = 64
    n_antennas: int = 16
    max_range: float = 50.0
    max_speed: float = 15.0
    frame_dt: float = 0.1
    noise_db: float | None = -40.0

    def __post_init__(self):
        for name in ("n_range", "n_angle", "n_doppler"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")
        if not (2 <= self.n_antennas <= self.n_angle):
            raise ValueError("n_antennas must lie in [2, n_angle]")
        if self.max_range <= 0 or self.max_speed <= 0:
            raise ValueError("max_range and max_speed must be positive")

    @classmethod
    def desk(cls, **overrides) -> "RadarParams":
        """Halved extents for fast tests and laptop-scale training."""
        base = dict(n_range=128, n_angle=128, n_doppler=32)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def full(cls, **overrides) -> "RadarParams":
        """Full-scale 256 x 256 x 64 cube."""
        return cls(**overrides)

    # ------------------------------------------------------------ bin mappings

    def range_bin(self, r: float) -> float:
        return r / self.max_range * self.n_range

    def range_from_bin(self, b: float) -> float:
        return b * self.max_range / self.n_range

    def doppler_bin(self, v: float) -> float:
        return self.n_doppler / 2 + v / self.max_speed * self.n_doppler / 2

    def speed_from_bin(self, b: float) -> float:
        return (b - self.n_doppler / 2) * 2 * self.max_speed / self.n_doppler

    def angle_bin(self, theta: float) -> float:
        return self.n_angle / 2 + math.sin(theta) * self.n_angle / 2

    def angle_from_bin(self, b: float) -> float:
        return math.asin((b - self.n_angle / 2) * 2 / self.n_angle)

    def check_coverage(self, target: "PointTarget") -> None:
        """Raise :class:`CoverageError` naming the violated bound."""
        br = self.range_bin(target.range)
        if not 0 <= br <= self.n_range - 1:
            raise CoverageError(
                f"range {target.range:.2f} m maps to bin {br:.1f}, outside "
                f"[0, {self.n_range - 1}] (max_range {self.max_range} m)")
        bd = self.doppler_bin(target.velocity)
        if not 0 <= bd <= self.n_doppler - 1:
            raise CoverageError(
                f"velocity {target.velocity:.2f} m/s maps to Doppler bin {bd:.1f}, "
                f"outside [0, {self.n_doppler - 1}] (max_speed {self.max_speed} m/s)")
        if abs(math.sin(target.angle)) > 1:
            raise CoverageError(f"angle {target.angle:.3f} rad has no sine")
        ba = self.angle_bin(target.angle)
        if not 0 <= ba <= self.n_angle - 1:
            raise CoverageError(
                f"angle {target.angle:.3f} rad maps to bin {ba:.1f}, outside "
                f"[0, {self.n_angle - 1}]")

    def in_coverage(self, target: "PointTarget") -> bool:
        try:
            self.check_coverage(target)
            return True
        except CoverageError:
            return False

    def view_element_counts(self) -> tuple[int, int]:
        """(RAD tensor elements, summed RD+AD+RA view elements)."""
        cube = self.n_range * self.n_angle * self.n_doppler
        views = (self.n_range * self.n_doppler
                 + self.n_angle * self.n_doppler
                 + self.n_range * self.n_angle)
        return cube, views


@dataclass
class PointTarget:
    """One reflector: kinematic state plus its signature footprint.

    ``extent`` holds per-axis half-widths in bins, ordered (range, angle,
    Doppler); objects occupy elliptical regions rather than single bins.
    """

    range: float
    velocity: float
    angle: float
    rcs: float = 1.0
    class_id: TargetClass = TargetClass.CAR
    extent: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.rcs <= 0:
            raise ValueError("rcs must be positive")
        if any(e < 1.0 for e in self.extent):
            raise ValueError("extent half-widths must be >= 1 bin per axis")
        self.class_id = TargetClass(self.class_id)
        if self.class_id == TargetClass.BACKGROUND:
            raise ValueError("targets cannot carry the background class")
