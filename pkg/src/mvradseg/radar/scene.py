"""Moving-target scenarios and frame-sequence simulation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .fft import fft_chain
from .params import PointTarget, RadarParams, TargetClass
from .synth import apply_speckle, synthesize_adc
from .views import ViewFrame, aggregate_views, render_masks

log = logging.getLogger(__name__)

# Per-class profiles: (speed range m/s, rcs range, extent half-widths
# (range, angle, Doppler) in bins).  Signature size and strength grow from
# pedestrian to car so the classes are separable from the views alone.
_CLASS_PROFILES = {
    TargetClass.PEDESTRIAN: ((0.4, 2.0), (0.5, 1.2), (2.0, 3.0, 1.5)),
    TargetClass.CYCLIST: ((1.5, 5.0), (1.0, 2.5), (3.0, 4.5, 2.5)),
    TargetClass.CAR: ((2.0, 10.0), (3.0, 8.0), (5.0, 7.0, 3.5)),
}


@dataclass
class TargetTrack:
    """A target with constant radial and angular velocity."""

    target: PointTarget
    angular_rate: float = 0.0

    def at_time(self, t: float) -> PointTarget:
        return replace(
            self.target,
            range=self.target.range + self.target.velocity * t,
            angle=self.target.angle + self.angular_rate * t,
        )


def random_scenario(params: RadarParams, rng: np.random.Generator,
                    n_targets: int | None = None) -> list[TargetTrack]:
    """Draw 1-2 moving targets with class-dependent signatures."""
    if n_targets is None:
        n_targets = int(rng.integers(1, 3))
    tracks = []
    for _ in range(n_targets):
        cls = TargetClass(int(rng.integers(1, 4)))
        (v_lo, v_hi), (rcs_lo, rcs_hi), extent = _CLASS_PROFILES[cls]
        speed = rng.uniform(v_lo, v_hi) * (1 if rng.random() < 0.5 else -1)
        jitter = rng.uniform(0.8, 1.2, size=3)
        target = PointTarget(
            range=rng.uniform(0.25, 0.75) * params.max_range,
            velocity=float(np.clip(speed, -0.9 * params.max_speed,
                                   0.9 * params.max_speed)),
            angle=rng.uniform(-0.7, 0.7),
            rcs=float(rng.uniform(rcs_lo, rcs_hi)),
            class_id=cls,
            extent=tuple(np.maximum(1.0, np.array(extent) * jitter)),
        )
        tracks.append(TargetTrack(target=target,
                                  angular_rate=float(rng.uniform(-0.05, 0.05))))
    return tracks


def simulate_sequence(params: RadarParams, scenario: list[TargetTrack],
                      n_frames: int, seed: int,
                      speckle: bool = True) -> list[ViewFrame]:
    """Propagate targets, synthesise each frame and aggregate its views.

    Per-frame randomness derives from (seed, frame index), so frames could be
    generated independently.  A target that leaves coverage is dropped from
    all subsequent frames (logged once).
    """
    frames = []
    alive = list(range(len(scenario)))
    for t in range(n_frames):
        now = t * params.frame_dt
        present = []
        for i in list(alive):
            target = scenario[i].at_time(now)
            if params.in_coverage(target):
                present.append(target)
            else:
                alive.remove(i)
                log.info("frame %d: target %d (%s) left coverage, dropping",
                         t, i, target.class_id.name)
        rng = np.random.default_rng((seed, t))
        adc = synthesize_adc(params, present, rng)
        rad = fft_chain(adc, params)
        if speckle:
            rad = apply_speckle(rad, rng)
        rd, ad, ra = aggregate_views(rad)
        rd_mask, ra_mask = render_masks(params, present)
        frames.append(ViewFrame(rd=rd, ad=ad, ra=ra, rd_mask=rd_mask,
                                ra_mask=ra_mask, index=t))
    return frames


def angle_for_sin(s: float) -> float:
    """Inverse of the array's angle response, clipped to the valid domain."""
    return math.asin(max(-1.0, min(1.0, s)))
