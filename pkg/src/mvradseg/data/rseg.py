"""RSEG tensor files: a tiny little-endian container for dense arrays.

Layout: magic ``RSEG`` (4 bytes), u32 version=1, u8 dtype code
(0=float32, 1=float64, 2=uint8), 3 reserved bytes, u32 ndims,
u64 dims[ndims], then the raw row-major payload.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"RSEG"
VERSION = 1
MAX_NDIMS = 16

_DTYPE_CODES = {np.dtype("<f4"): 0, np.dtype("<f8"): 1, np.dtype("u1"): 2}
_CODE_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8"), 2: np.dtype("u1")}


class RsegFormatError(ValueError):
    """Raised for bad magic/version, truncation or inconsistent dims."""


def save_tensor(path, array: np.ndarray) -> None:
    """Write ``array`` losslessly; dtype must be f32, f64 or u8."""
    array = np.ascontiguousarray(array)
    dtype = array.dtype.newbyteorder("<") if array.dtype.byteorder == ">" else array.dtype
    if dtype not in _DTYPE_CODES:
        raise RsegFormatError(f"unsupported dtype {array.dtype} (use f32/f64/u8)")
    if array.ndim > MAX_NDIMS:
        raise RsegFormatError(f"ndims {array.ndim} exceeds {MAX_NDIMS}")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<B3x", _DTYPE_CODES[dtype]))
        fh.write(struct.pack("<I", array.ndim))
        fh.write(struct.pack(f"<{array.ndim}Q", *array.shape))
        fh.write(array.astype(dtype, copy=False).tobytes())


def load_tensor(path) -> np.ndarray:
    """Read an RSEG file back into the dtype it was stored with."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 16 or blob[:4] != MAGIC:
        raise RsegFormatError(f"{path}: not an RSEG file (bad magic)")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != VERSION:
        raise RsegFormatError(f"{path}: unsupported version {version}")
    (code,) = struct.unpack_from("<B", blob, 8)
    if code not in _CODE_DTYPES:
        raise RsegFormatError(f"{path}: unknown dtype code {code}")
    (ndims,) = struct.unpack_from("<I", blob, 12)
    if ndims > MAX_NDIMS:
        raise RsegFormatError(f"{path}: ndims {ndims} exceeds {MAX_NDIMS}")
    header_end = 16 + 8 * ndims
    if len(blob) < header_end:
        raise RsegFormatError(f"{path}: truncated header")
    dims = struct.unpack_from(f"<{ndims}Q", blob, 16)
    dtype = _CODE_DTYPES[code]
    count = 1
    for d in dims:
        count *= d
    expected = header_end + count * dtype.itemsize
    if len(blob) != expected:
        raise RsegFormatError(
            f"{path}: payload is {len(blob) - header_end} bytes, "
            f"dims {dims} require {count * dtype.itemsize}")
    data = np.frombuffer(blob, dtype=dtype, offset=header_end, count=count)
    return data.reshape(dims).copy()
