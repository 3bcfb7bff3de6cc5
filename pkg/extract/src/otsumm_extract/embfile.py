"""Writer for the otsumm embedding file format.

Layout: magic ``SCCSEMB1``, rows (u32 LE), dims (u32 LE), then rows x dims
float32 LE values row-major. This module implements the published format
directly; the core package is consumed only through its file interfaces.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SCCSEMB1"
_HEADER = struct.Struct("<II")


def write_embeddings(rows: np.ndarray, path: str | Path) -> None:
    arr = np.ascontiguousarray(np.asarray(rows, dtype=np.float32))
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"embedding payload must be a nonempty 2-D array, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("embedding payload contains non-finite values")
    blob = MAGIC + _HEADER.pack(*arr.shape) + arr.astype("<f4", copy=False).tobytes(order="C")
    Path(path).write_bytes(blob)


def write_pgm_stack(frames: list[np.ndarray], path: str | Path) -> None:
    """Concatenated binary P5 images, 8-bit, one per frame."""
    parts = []
    for frame in frames:
        arr = np.ascontiguousarray(frame.astype(np.uint8))
        h, w = arr.shape
        parts.append(f"P5\n{w} {h}\n255\n".encode("ascii") + arr.tobytes(order="C"))
    Path(path).write_bytes(b"".join(parts))
