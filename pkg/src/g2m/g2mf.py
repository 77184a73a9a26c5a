"""G2MF: the little-endian binary container for feature tensors.

Layout: magic "G2MF" (4 bytes), version u32 = 1, dtype u32 (0 = float32),
rank u32, dims u32 * rank, then the row-major payload. Errors report the
byte offset of the offending field so truncated or foreign files are easy
to diagnose.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"G2MF"
VERSION = 1
DTYPE_FLOAT32 = 0
_MAX_RANK = 8
_MAX_ELEMENTS = 1 << 40


class G2MFError(ValueError):
    """Malformed G2MF file; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def save(path: str | Path, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype="<f4")
    if arr.ndim < 1 or arr.ndim > _MAX_RANK:
        raise ValueError(f"rank {arr.ndim} outside 1..{_MAX_RANK}")
    header = struct.pack("<4sIII", MAGIC, VERSION, DTYPE_FLOAT32, arr.ndim)
    dims = struct.pack(f"<{arr.ndim}I", *arr.shape)
    Path(path).write_bytes(header + dims + arr.tobytes(order="C"))


def load(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise G2MFError(f"file too short for header ({len(data)} bytes)", len(data))
    magic, version, dtype, rank = struct.unpack_from("<4sIII", data, 0)
    if magic != MAGIC:
        raise G2MFError(f"bad magic {magic!r}", 0)
    if version != VERSION:
        raise G2MFError(f"unsupported version {version}", 4)
    if dtype != DTYPE_FLOAT32:
        raise G2MFError(f"unsupported dtype code {dtype}", 8)
    if not 1 <= rank <= _MAX_RANK:
        raise G2MFError(f"rank {rank} outside 1..{_MAX_RANK}", 12)
    dims_end = 16 + 4 * rank
    if len(data) < dims_end:
        raise G2MFError("file truncated inside dims", len(data))
    dims = struct.unpack_from(f"<{rank}I", data, 16)
    count = 1
    for i, d in enumerate(dims):
        if d < 1:
            raise G2MFError(f"dimension {i} is {d}", 16 + 4 * i)
        count *= d
        if count > _MAX_ELEMENTS:
            raise G2MFError(f"element count overflows at dimension {i}", 16 + 4 * i)
    expected = dims_end + 4 * count
    if len(data) != expected:
        raise G2MFError(
            f"payload length {len(data) - dims_end} != {4 * count} for dims {dims}",
            dims_end)
    flat = np.frombuffer(data, dtype="<f4", offset=dims_end, count=count)
    return flat.reshape(dims).copy()
