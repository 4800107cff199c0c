"""Multi-view radar semantic segmentation toolkit.

End-to-end pieces: synthetic FMCW radar data generation, range/angle/Doppler
view preprocessing, multi-view encoder-decoder segmentation networks built on
an in-package autodiff engine, the weighted-CE / Soft-Dice / coherence loss
suite, IoU/Dice evaluation, and a reproducible training harness.
"""

__version__ = "0.1.0"
