"""Dataset persistence, statistics, sampling and augmentation."""

from .rseg import RsegFormatError, load_tensor, save_tensor
from .dataset import (
    SPLITS,
    VIEWS,
    DatasetError,
    DatasetIndex,
    build_dataset,
    compute_class_weights,
    denormalize_view,
    normalize_view,
    parse_kv,
)
from .sampling import (
    LAYOUT_CHANNELS,
    LAYOUT_DEPTH,
    Sample,
    augment_flip,
    batch_samples,
    one_hot,
    stack_sample,
)

__all__ = [
    "DatasetError",
    "DatasetIndex",
    "LAYOUT_CHANNELS",
    "LAYOUT_DEPTH",
    "RsegFormatError",
    "SPLITS",
    "Sample",
    "VIEWS",
    "augment_flip",
    "batch_samples",
    "build_dataset",
    "compute_class_weights",
    "denormalize_view",
    "load_tensor",
    "normalize_view",
    "one_hot",
    "parse_kv",
    "save_tensor",
    "stack_sample",
]
