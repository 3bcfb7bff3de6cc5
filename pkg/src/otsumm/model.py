"""Shared data types plus the binary embedding and JSON manifest formats.

Embedding file layout (magic ``SCCSEMB1``)::

    bytes 0..7    magic  b"SCCSEMB1"
    bytes 8..11   rows   unsigned 32-bit little-endian
    bytes 12..15  dims   unsigned 32-bit little-endian
    bytes 16..    rows * dims IEEE-754 binary32 values, little-endian,
                  row-major

The write/read pair is bit-exact for every finite float32 payload; NaN and
infinities are rejected at read time so downstream solvers never divide by
poisoned values.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadMagic,
    EmptySegment,
    GapDetected,
    IoFailure,
    NonFiniteValue,
    OverlapDetected,
    TruncatedFile,
)

MAGIC = b"SCCSEMB1"
_HEADER = struct.Struct("<II")

Range = tuple[int, int]


@dataclass(frozen=True)
class EmbeddingMatrix:
    """A rows x dims sequence of feature vectors (frames, shots, tokens, or
    sentences). Stored as float32, read-only after construction."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"embedding matrix must be 2-D, got shape {arr.shape}")
        rows, dims = arr.shape
        if rows < 1 or dims < 1:
            raise ValueError(f"embedding matrix needs rows >= 1 and dims >= 1, got {rows}x{dims}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding matrix contains non-finite values")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def dims(self) -> int:
        return int(self.data.shape[1])

    def take_rows(self, indices: Sequence[int]) -> "EmbeddingMatrix":
        return EmbeddingMatrix(self.data[np.asarray(indices, dtype=np.intp)])


@dataclass(frozen=True)
class FrameBuffer:
    """A single grayscale frame, intensities in [0, 255].

    Frames smaller than 3x3 are accepted here; Laplacian-based operations
    reject them at the call site.
    """

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels, dtype=np.uint8)
        if arr.shape != (self.height, self.width):
            raise ValueError(
                f"pixel buffer shape {arr.shape} does not match {self.height}x{self.width}"
            )
        if self.width < 1 or self.height < 1:
            raise ValueError("frame must have positive dimensions")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)


@dataclass(frozen=True)
class SegmentPartition:
    """Ordered, contiguous, non-overlapping [start, end) ranges over an item
    sequence. Use :func:`validate_partition` against the item count."""

    boundaries: tuple[Range, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "boundaries", tuple((int(s), int(e)) for s, e in self.boundaries)
        )

    def __len__(self) -> int:
        return len(self.boundaries)

    def __iter__(self):
        return iter(self.boundaries)


def validate_partition(p: SegmentPartition | Sequence[Range], n: int) -> None:
    """Check that the ranges sort-merge to exactly [0, n).

    Raises GapDetected, OverlapDetected, or EmptySegment; accepts exactly the
    partitions whose sorted ranges tile [0, n).
    """
    ranges = list(p.boundaries if isinstance(p, SegmentPartition) else p)
    if not ranges:
        raise GapDetected(f"no ranges cover [0, {n})")
    for start, end in ranges:
        if start >= end:
            raise EmptySegment(f"range [{start}, {end}) is empty")
    ordered = sorted(ranges)
    if ordered[0][0] != 0:
        raise GapDetected(f"coverage starts at {ordered[0][0]}, expected 0")
    prev_end = ordered[0][1]
    for start, end in ordered[1:]:
        if start < prev_end:
            raise OverlapDetected(f"range [{start}, {end}) overlaps previous end {prev_end}")
        if start > prev_end:
            raise GapDetected(f"gap between {prev_end} and {start}")
        prev_end = end
    if prev_end != n:
        raise GapDetected(f"coverage ends at {prev_end}, expected {n}")


@dataclass
class CandidatePair:
    """One visual summary candidate paired with one textual candidate.

    ``distance`` starts unset and is filled by the alignment solvers; it is
    the only mutable field.
    """

    visual_candidate: EmbeddingMatrix
    textual_candidate: EmbeddingMatrix
    visual_segment_id: int
    textual_segment_id: int
    distance: Optional[float] = None

    def __post_init__(self) -> None:
        if self.distance is not None and self.distance < 0:
            raise ValueError("alignment distance must be nonnegative")


@dataclass(frozen=True)
class Manifest:
    """Input description for an end-to-end alignment run.

    Paths are resolved relative to the manifest file's directory. The
    ``overrides`` mapping may set any pipeline knob (lambda, beta, tau,
    omega_b, k, cut_threshold, smooth_window, threshold_multiplier, seed,
    outer, inner, tol); CLI flags take precedence over it.
    """

    frame_embeddings_path: str
    sentence_texts_path: str
    sentence_embeddings_path: str
    raw_frames_path: Optional[str] = None
    overrides: dict = field(default_factory=dict)

    base_dir: Path = field(default_factory=Path)

    def resolve(self, rel: str) -> Path:
        path = Path(rel)
        return path if path.is_absolute() else self.base_dir / path


_MANIFEST_REQUIRED = ("frame_embeddings_path", "sentence_texts_path", "sentence_embeddings_path")
_MANIFEST_OPTIONAL = ("raw_frames_path", "overrides")

MANIFEST_OVERRIDE_KEYS = (
    "lambda",
    "beta",
    "tau",
    "omega_b",
    "k",
    "cut_threshold",
    "smooth_window",
    "threshold_multiplier",
    "diff_gain",
    "rel_gain",
    "seed",
    "outer",
    "inner",
    "tol",
    "max_iters",
)


def load_manifest(path: str | Path) -> Manifest:
    """Parse and field-check a UTF-8 JSON manifest."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"manifest {path} must be a JSON object")
    for key in _MANIFEST_REQUIRED:
        if key not in raw:
            raise ValueError(f"manifest {path} is missing required field '{key}'")
        if not isinstance(raw[key], str):
            raise ValueError(f"manifest field '{key}' must be a string path")
    unknown = set(raw) - set(_MANIFEST_REQUIRED) - set(_MANIFEST_OPTIONAL)
    if unknown:
        raise ValueError(f"manifest has unknown field '{sorted(unknown)[0]}'")
    overrides = raw.get("overrides", {})
    if not isinstance(overrides, dict):
        raise ValueError("manifest field 'overrides' must be an object")
    for key in overrides:
        if key not in MANIFEST_OVERRIDE_KEYS:
            raise ValueError(f"manifest override has unknown field '{key}'")
    raw_frames = raw.get("raw_frames_path")
    if raw_frames is not None and not isinstance(raw_frames, str):
        raise ValueError("manifest field 'raw_frames_path' must be a string path")
    return Manifest(
        frame_embeddings_path=raw["frame_embeddings_path"],
        sentence_texts_path=raw["sentence_texts_path"],
        sentence_embeddings_path=raw["sentence_embeddings_path"],
        raw_frames_path=raw_frames,
        overrides=dict(overrides),
        base_dir=path.parent,
    )


def read_embeddings(path: str | Path) -> EmbeddingMatrix:
    """Decode an embedding file, naming the byte offset of any defect."""
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC):
        raise TruncatedFile(f"{path}: file ends at byte {len(data)} inside the 8-byte magic")
    if data[: len(MAGIC)] != MAGIC:
        raise BadMagic(f"{path}: bad magic {data[:8]!r} at byte offset 0, expected {MAGIC!r}")
    header_end = len(MAGIC) + _HEADER.size
    if len(data) < header_end:
        raise TruncatedFile(f"{path}: file ends at byte {len(data)} inside the header (need {header_end})")
    rows, dims = _HEADER.unpack_from(data, len(MAGIC))
    expected = header_end + 4 * rows * dims
    if len(data) < expected:
        raise TruncatedFile(
            f"{path}: payload ends at byte {len(data)}, header declares {rows}x{dims} "
            f"floats ending at byte {expected}"
        )
    if len(data) > expected:
        raise TruncatedFile(
            f"{path}: {len(data) - expected} trailing bytes after byte {expected}"
        )
    values = np.frombuffer(data, dtype="<f4", count=rows * dims, offset=header_end)
    bad = np.nonzero(~np.isfinite(values))[0]
    if bad.size:
        i = int(bad[0])
        raise NonFiniteValue(
            f"{path}: non-finite value at byte offset {header_end + 4 * i} "
            f"(row {i // dims}, col {i % dims})"
        )
    if rows < 1 or dims < 1:
        raise ValueError(f"{path}: header declares degenerate shape {rows}x{dims}")
    return EmbeddingMatrix(values.astype(np.float32).reshape(rows, dims))


def write_embeddings(m: EmbeddingMatrix, path: str | Path) -> None:
    """Write ``m`` so that a read reproduces it bit-exactly."""
    payload = m.data.astype("<f4", copy=False).tobytes(order="C")
    blob = MAGIC + _HEADER.pack(m.rows, m.dims) + payload
    try:
        Path(path).write_bytes(blob)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
