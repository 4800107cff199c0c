"""On-disk dataset layout, global statistics and class weights.

A dataset root looks like::

    root/meta.txt
    root/{train,val,test}/seq_NNN/frame_TTTT.{rd,ra,ad,rdmask,ramask}.rseg

``meta.txt`` is plain ``key=value`` text holding extents, the class count,
per-sequence frame counts, the global per-view min/max of the *train* split
and the train-split per-class bin counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..radar.params import N_CLASSES, CLASS_NAMES, RadarParams
from ..radar.scene import random_scenario, simulate_sequence
from ..radar.views import ViewFrame
from .rseg import load_tensor, save_tensor

SPLITS = ("train", "val", "test")
VIEWS = ("rd", "ra", "ad")


class DatasetError(Exception):
    """Missing files, malformed metadata or degenerate statistics."""


@dataclass
class DatasetIndex:
    """Parsed view of one dataset root."""

    root: Path
    n_classes: int
    extents: tuple[int, int, int]
    splits: dict[str, list[str]]
    frame_counts: dict[str, int]
    stats: dict[str, tuple[float, float]]
    class_counts: np.ndarray
    seed: int

    @classmethod
    def from_root(cls, root) -> "DatasetIndex":
        root = Path(root)
        meta_path = root / "meta.txt"
        if not meta_path.is_file():
            raise DatasetError(f"{meta_path} not found")
        meta = parse_kv(meta_path.read_text())
        try:
            n_classes = int(meta["n_classes"])
            extents = tuple(int(meta[k]) for k in ("n_range", "n_angle", "n_doppler"))
            seed = int(meta.get("seed", "0"))
            splits = {}
            for split in SPLITS:
                ids = meta.get(f"split.{split}.sequences", "")
                splits[split] = [s for s in ids.split(",") if s]
            frame_counts = {}
            for split in SPLITS:
                for seq in splits[split]:
                    frame_counts[seq] = int(meta[f"seq.{seq}.frames"])
            stats = {v: (float(meta[f"stats.{v}.min"]), float(meta[f"stats.{v}.max"]))
                     for v in VIEWS}
            counts = np.array([int(meta[f"class_count.{k}"])
                               for k in range(n_classes)], dtype=np.int64)
        except KeyError as exc:
            raise DatasetError(f"{meta_path}: missing key {exc}") from exc
        index = cls(root=root, n_classes=n_classes, extents=extents,
                    splits=splits, frame_counts=frame_counts, stats=stats,
                    class_counts=counts, seed=seed)
        for split in SPLITS:
            for seq in splits[split]:
                seq_dir = root / split / seq
                if not seq_dir.is_dir():
                    raise DatasetError(f"{seq_dir} listed in meta.txt but missing")
        return index

    def frame_dir(self, split: str, seq: str) -> Path:
        return self.root / split / seq

    def load_frames(self, split: str, seq: str) -> list[ViewFrame]:
        seq_dir = self.frame_dir(split, seq)
        frames = []
        for t in range(self.frame_counts[seq]):
            stem = seq_dir / f"frame_{t:04d}"
            frames.append(ViewFrame(
                rd=load_tensor(f"{stem}.rd.rseg"),
                ra=load_tensor(f"{stem}.ra.rseg"),
                ad=load_tensor(f"{stem}.ad.rseg"),
                rd_mask=load_tensor(f"{stem}.rdmask.rseg"),
                ra_mask=load_tensor(f"{stem}.ramask.rseg"),
                index=t,
            ))
        return frames

    def sample_positions(self, split: str, q: int) -> list[tuple[str, int]]:
        """All (sequence, t) pairs with a full t-q..t history (starts skipped)."""
        positions = []
        for seq in self.splits[split]:
            for t in range(q, self.frame_counts[seq]):
                positions.append((seq, t))
        return positions


def parse_kv(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DatasetError(f"meta line {lineno} is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def compute_class_weights(class_counts: np.ndarray) -> np.ndarray:
    """Weights inversely proportional to train-split class frequency, sum 1."""
    counts = np.asarray(class_counts, dtype=np.float64)
    for k, c in enumerate(counts):
        if c <= 0:
            name = CLASS_NAMES[k] if k < len(CLASS_NAMES) else str(k)
            raise DatasetError(
                f"class {k} ({name}) absent from the train split; "
                f"cannot form inverse-frequency weights")
    inv = 1.0 / counts
    return inv / inv.sum()


def normalize_view(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Min-max scale into [0, 1] with train statistics; out-of-range clamps."""
    if hi <= lo:
        raise DatasetError(f"degenerate view statistics: min {lo} >= max {hi}")
    return np.clip((x - lo) / (hi - lo), 0.0, 1.0)


def denormalize_view(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return x * (hi - lo) + lo


def build_dataset(root, params: RadarParams, seed: int,
                  frames_per_sequence: int = 10,
                  sequences: dict[str, int] | None = None,
                  speckle: bool = True) -> DatasetIndex:
    """Simulate and persist a dataset; returns its index.

    ``sequences`` maps split name to sequence count.  Statistics and class
    counts come from the train split only.
    """
    root = Path(root)
    if sequences is None:
        sequences = {"train": 4, "val": 1, "test": 1}
    seq_ids: dict[str, list[str]] = {s: [] for s in SPLITS}
    frame_counts: dict[str, int] = {}
    stats = {v: [np.inf, -np.inf] for v in VIEWS}
    class_counts = np.zeros(N_CLASSES, dtype=np.int64)

    seq_no = 0
    lines = [
        f"n_classes={N_CLASSES}",
        f"n_range={params.n_range}",
        f"n_angle={params.n_angle}",
        f"n_doppler={params.n_doppler}",
        f"seed={seed}",
    ]
    for split in SPLITS:
        for _ in range(sequences.get(split, 0)):
            seq = f"seq_{seq_no:03d}"
            scenario_rng = np.random.default_rng((seed, seq_no))
            scenario = random_scenario(params, scenario_rng)
            frames = simulate_sequence(params, scenario, frames_per_sequence,
                                       seed=seed * 1_000_003 + seq_no,
                                       speckle=speckle)
            seq_dir = root / split / seq
            seq_dir.mkdir(parents=True, exist_ok=True)
            for frame in frames:
                stem = seq_dir / f"frame_{frame.index:04d}"
                save_tensor(f"{stem}.rd.rseg", frame.rd.astype(np.float32))
                save_tensor(f"{stem}.ra.rseg", frame.ra.astype(np.float32))
                save_tensor(f"{stem}.ad.rseg", frame.ad.astype(np.float32))
                save_tensor(f"{stem}.rdmask.rseg", frame.rd_mask)
                save_tensor(f"{stem}.ramask.rseg", frame.ra_mask)
                if split == "train":
                    for view in VIEWS:
                        arr = getattr(frame, view).astype(np.float32)
                        stats[view][0] = min(stats[view][0], float(arr.min()))
                        stats[view][1] = max(stats[view][1], float(arr.max()))
                    class_counts += np.bincount(frame.rd_mask.ravel(),
                                                minlength=N_CLASSES)
                    class_counts += np.bincount(frame.ra_mask.ravel(),
                                                minlength=N_CLASSES)
            seq_ids[split].append(seq)
            frame_counts[seq] = frames_per_sequence
            seq_no += 1

    for split in SPLITS:
        lines.append(f"split.{split}.sequences={','.join(seq_ids[split])}")
    for seq, count in frame_counts.items():
        lines.append(f"seq.{seq}.frames={count}")
    for view in VIEWS:
        lines.append(f"stats.{view}.min={stats[view][0]!r}")
        lines.append(f"stats.{view}.max={stats[view][1]!r}")
    for k in range(N_CLASSES):
        lines.append(f"class_count.{k}={int(class_counts[k])}")
    (root / "meta.txt").write_text("\n".join(lines) + "\n")
    return DatasetIndex.from_root(root)
