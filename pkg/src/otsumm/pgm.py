"""Binary PGM (P5, 8-bit) frame input and transport-plan export.

A frames file is one or more binary PGM images concatenated back to back.
Plan heatmaps are written as a single P5 image scaled to the plan's max
entry; CSV export writes the raw float64 values at full precision.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import BadHeader, DepthUnsupported, IoFailure
from .model import FrameBuffer
from .ot import TransportPlan

_WHITESPACE = b" \t\n\r\x0b\x0c"


def read_pgm_frames(path: str | Path) -> list[FrameBuffer]:
    """Parse concatenated binary PGM images; errors name the byte offset."""
    data = Path(path).read_bytes()
    frames: list[FrameBuffer] = []
    pos = 0
    while pos < len(data):
        frame, pos = _read_one(data, pos, path)
        frames.append(frame)
    if not frames:
        raise BadHeader(f"{path}: empty file at byte offset 0")
    return frames


def _read_one(data: bytes, pos: int, path) -> tuple[FrameBuffer, int]:
    start = pos
    if data[pos : pos + 2] != b"P5":
        raise BadHeader(f"{path}: expected 'P5' at byte offset {pos}")
    pos += 2
    fields = []
    for _ in range(3):
        value, pos = _read_header_int(data, pos, path)
        fields.append(value)
    width, height, maxval = fields
    if maxval > 255:
        raise DepthUnsupported(f"{path}: maxval {maxval} at image offset {start}; only 8-bit supported")
    if width < 1 or height < 1 or maxval < 1:
        raise BadHeader(f"{path}: degenerate header {width}x{height} maxval {maxval} at byte offset {start}")
    if pos >= len(data) or data[pos : pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise BadHeader(f"{path}: expected single whitespace after maxval at byte offset {pos}")
    pos += 1
    count = width * height
    if pos + count > len(data):
        raise BadHeader(
            f"{path}: pixel data ends at byte {len(data)}, image at offset {start} needs {pos + count}"
        )
    pixels = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos).reshape(height, width)
    return FrameBuffer(width=width, height=height, pixels=pixels), pos + count


def _read_header_int(data: bytes, pos: int, path) -> tuple[int, int]:
    # Skip whitespace and '#' comments, then parse a decimal token.
    while pos < len(data):
        byte = data[pos : pos + 1]
        if byte in (b"#",):
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif byte in (b" ", b"\t", b"\n", b"\r", b"\x0b", b"\x0c"):
            pos += 1
        else:
            break
    begin = pos
    while pos < len(data) and data[pos : pos + 1].isdigit():
        pos += 1
    if pos == begin:
        raise BadHeader(f"{path}: expected integer in header at byte offset {begin}")
    return int(data[begin:pos]), pos


def export_plan_heatmap(plan: TransportPlan, path: str | Path) -> None:
    """Write the plan as .pgm (max-scaled bytes) or .csv (full precision)."""
    path = Path(path)
    if path.suffix == ".pgm":
        blob = plan_to_pgm_bytes(plan.T)
    elif path.suffix == ".csv":
        blob = plan_to_csv_bytes(plan.T)
    else:
        raise ValueError(f"plan export needs a .pgm or .csv path, got {path.name!r}")
    try:
        path.write_bytes(blob)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def plan_to_pgm_bytes(T: np.ndarray) -> bytes:
    """P5 image, width M, height K, maxval 255; entries scaled by the plan
    max and rounded half away from zero. An all-zero plan maps to all-zero
    bytes."""
    K, M = T.shape
    top = float(T.max())
    if top == 0.0:
        scaled = np.zeros((K, M), dtype=np.uint8)
    else:
        scaled = np.floor(255.0 * T / top + 0.5).astype(np.uint8)
    header = f"P5\n{M} {K}\n255\n".encode("ascii")
    return header + scaled.tobytes(order="C")


def plan_to_csv_bytes(T: np.ndarray) -> bytes:
    rows = [",".join(repr(float(v)) for v in row) for row in T]
    return ("\n".join(rows) + "\n").encode("ascii")
