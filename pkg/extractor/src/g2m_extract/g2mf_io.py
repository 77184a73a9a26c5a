"""Standalone G2MF writer/reader for the extraction shim.

Implements the published byte layout directly (magic "G2MF", version u32 = 1,
dtype u32 with 0 = float32, rank u32, dims u32 * rank, row-major payload,
all little-endian) so the shim depends only on the format, not on the
consumer's code.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"G2MF"
VERSION = 1
DTYPE_FLOAT32 = 0


def write_tensor(path: str | Path, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype="<f4")
    if not 1 <= arr.ndim <= 8:
        raise ValueError(f"rank {arr.ndim} unsupported")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIII", MAGIC, VERSION, DTYPE_FLOAT32, arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(arr.tobytes(order="C"))


def read_tensor(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:4] != MAGIC:
        raise ValueError(f"{path}: not a G2MF file")
    version, dtype, rank = struct.unpack_from("<III", data, 4)
    if version != VERSION or dtype != DTYPE_FLOAT32 or not 1 <= rank <= 8:
        raise ValueError(f"{path}: unsupported header ({version}, {dtype}, {rank})")
    dims = struct.unpack_from(f"<{rank}I", data, 16)
    count = int(np.prod(dims))
    offset = 16 + 4 * rank
    if len(data) != offset + 4 * count:
        raise ValueError(f"{path}: truncated payload at byte {len(data)}")
    return np.frombuffer(data, dtype="<f4", offset=offset, count=count).reshape(dims).copy()
