"""Decode input media into grayscale frame arrays.

Supported sources:
  * concatenated binary PGM stacks (the pipeline's own raw-frame format),
  * a directory of image files (decoded with Pillow, sorted by name),
  * a video file (decoded with OpenCV when the cv2 module is available).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeFailure

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".pgm", ".webp"}


def decode_frames(path: str | Path) -> list[np.ndarray]:
    """Return one uint8 H x W grayscale array per frame, in order."""
    path = Path(path)
    if not path.exists():
        raise DecodeFailure(f"{path}: no such file or directory")
    if path.is_dir():
        return _decode_image_dir(path)
    if path.suffix == ".pgm":
        return _decode_pgm_stack(path)
    if path.suffix in _IMAGE_SUFFIXES:
        return [_decode_image(path)]
    return _decode_video(path)


def sample_frames(frames: list[np.ndarray], rate: int) -> list[np.ndarray]:
    """Keep every rate-th frame starting at frame 0."""
    if rate < 1:
        raise ValueError("sampling rate must be at least 1")
    return frames[::rate]


def _decode_image(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("L"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeFailure(f"{path}: {exc}") from exc


def _decode_image_dir(path: Path) -> list[np.ndarray]:
    files = sorted(p for p in path.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
    if not files:
        raise DecodeFailure(f"{path}: directory contains no image files")
    return [_decode_image(p) for p in files]


def _decode_pgm_stack(path: Path) -> list[np.ndarray]:
    data = path.read_bytes()
    frames = []
    pos = 0
    while pos < len(data):
        if data[pos : pos + 2] != b"P5":
            raise DecodeFailure(f"{path}: expected 'P5' at byte offset {pos}")
        pos += 2
        fields = []
        for _ in range(3):
            while pos < len(data) and (data[pos : pos + 1].isspace() or data[pos : pos + 1] == b"#"):
                if data[pos : pos + 1] == b"#":
                    while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                        pos += 1
                else:
                    pos += 1
            begin = pos
            while pos < len(data) and data[pos : pos + 1].isdigit():
                pos += 1
            if pos == begin:
                raise DecodeFailure(f"{path}: malformed PGM header at byte offset {begin}")
            fields.append(int(data[begin:pos]))
        width, height, maxval = fields
        if maxval > 255 or maxval < 1 or width < 1 or height < 1:
            raise DecodeFailure(f"{path}: unsupported PGM header {width}x{height} maxval {maxval}")
        pos += 1
        count = width * height
        if pos + count > len(data):
            raise DecodeFailure(f"{path}: pixel data truncated at byte offset {len(data)}")
        frames.append(
            np.frombuffer(data, dtype=np.uint8, count=count, offset=pos).reshape(height, width).copy()
        )
        pos += count
    if not frames:
        raise DecodeFailure(f"{path}: empty PGM stack")
    return frames


def _decode_video(path: Path) -> list[np.ndarray]:
    try:
        import cv2
    except ImportError as exc:
        raise DecodeFailure(
            f"{path}: video decoding needs the cv2 module, which is not installed"
        ) from exc
    capture = cv2.VideoCapture(str(path))
    frames = []
    try:
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            frames.append(cv2.cvtColor(frame, cv2.COLOR_BGR2GRAY).astype(np.uint8))
    finally:
        capture.release()
    if not frames:
        raise DecodeFailure(f"{path}: no decodable video frames")
    return frames
