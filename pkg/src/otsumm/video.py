"""Shot detection and scene-boundary scoring over frame embeddings.

Shots come from thresholding consecutive-frame cosine distance. Scene
boundaries are scored with two deterministic branches: a difference branch
(cosine distance between mean-pooled shot windows on either side of the
boundary) and a relation branch (max-pooled consecutive-shot similarity
across the window). A fixed logistic combiner maps both to a score in
(0, 1), which is smoothed and thresholded into the final partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, ZeroNormRow
from .model import EmbeddingMatrix, SegmentPartition, validate_partition


@dataclass(frozen=True)
class ShotSequence:
    """Frame index ranges per shot plus one pooled unit-norm feature row per
    shot."""

    shots: tuple[tuple[int, int], ...]
    shot_features: EmbeddingMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "shots", tuple((int(s), int(e)) for s, e in self.shots))
        if len(self.shots) != self.shot_features.rows:
            raise ValueError(
                f"{len(self.shots)} shots but {self.shot_features.rows} feature rows"
            )
        validate_partition(self.shots, self.shots[-1][1])

    @property
    def n_frames(self) -> int:
        return self.shots[-1][1]


@dataclass(frozen=True)
class BoundaryScore:
    """Score for the boundary after shot ``index``.

    diff_score is the cosine distance of the pooled windows (0 = identical,
    2 = antipodal); rel_score the strongest consecutive similarity in the
    window; s the combined coarse score in [0, 1].
    """

    index: int
    diff_score: float
    rel_score: float
    s: float


@dataclass(frozen=True)
class VtsConfig:
    """Boundary-scoring knobs.

    omega_b is the half-window in shots, tau the binarization threshold,
    smooth_window the (odd) width of the coarse-score moving average.
    diff_gain/rel_gain weight the two branches inside the logistic combiner
    s = sigmoid(diff_gain * (diff - 1) + rel_gain * (1 - rel)), which is
    centered so that identical windows with a cohesive interior score
    sigmoid(-diff_gain).
    """

    omega_b: int = 2
    tau: float = 0.5
    smooth_window: int = 3
    diff_gain: float = 4.0
    rel_gain: float = 4.0

    def __post_init__(self) -> None:
        if self.omega_b < 1:
            raise ValueError("omega_b must be at least 1")
        if not (0 < self.tau < 1):
            raise ValueError("tau must lie in (0, 1)")
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise ValueError("smooth_window must be a positive odd integer")


DEFAULT_CUT_THRESHOLD = 0.5


def detect_shots(frames: EmbeddingMatrix, cut_threshold: float = DEFAULT_CUT_THRESHOLD) -> ShotSequence:
    """Cut between consecutive frames whose cosine distance exceeds the
    threshold; pool each shot to a renormalized mean feature row."""
    if cut_threshold <= 0:
        raise ValueError("cut_threshold must be positive")
    unit = _unit_rows(frames.data, "frame")
    n = frames.rows
    if n == 1:
        cuts = np.zeros(0, dtype=bool)
    else:
        sims = np.sum(unit[:-1] * unit[1:], axis=1)
        cuts = (1.0 - sims) > cut_threshold
    starts = [0] + [i + 1 for i in np.nonzero(cuts)[0]]
    ends = starts[1:] + [n]
    shots = tuple(zip(starts, ends))
    features = np.empty((len(shots), frames.dims), dtype=np.float64)
    for j, (s, e) in enumerate(shots):
        features[j] = unit[s:e].mean(axis=0)
    norms = np.linalg.norm(features, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ZeroNormRow(f"shot {int(zero[0])} pooled to a zero vector")
    features /= norms[:, None]
    return ShotSequence(shots, EmbeddingMatrix(features.astype(np.float32)))


def boundary_representation(shots: ShotSequence, i: int, cfg: VtsConfig) -> BoundaryScore:
    """Score the boundary between shot i and shot i+1.

    Windows of up to omega_b shots on each side are clamped at the sequence
    edges so short videos still score every boundary.
    """
    n = len(shots.shots)
    if not (0 <= i <= n - 2):
        raise IndexOutOfRange(f"boundary index {i} outside [0, {n - 2}]")
    feats = shots.shot_features.data.astype(np.float64)
    lo = max(0, i - cfg.omega_b + 1)
    hi = min(n - 1, i + cfg.omega_b)
    before = feats[lo : i + 1].mean(axis=0)
    after = feats[i + 1 : hi + 1].mean(axis=0)
    diff = 1.0 - _cos(before, after, f"boundary {i}")
    window = feats[lo : hi + 1]
    consec = np.sum(window[:-1] * window[1:], axis=1)
    norm_prod = np.linalg.norm(window[:-1], axis=1) * np.linalg.norm(window[1:], axis=1)
    rel = float(np.max(consec / norm_prod))
    s = _sigmoid(cfg.diff_gain * (diff - 1.0) + cfg.rel_gain * (1.0 - rel))
    return BoundaryScore(index=i, diff_score=float(diff), rel_score=rel, s=float(s))


def segment_scenes(shots: ShotSequence, cfg: VtsConfig) -> SegmentPartition:
    """Smooth the coarse boundary scores and cut where they exceed tau."""
    n = len(shots.shots)
    if n == 1:
        return SegmentPartition(((0, 1),))
    scores = np.array([boundary_representation(shots, i, cfg).s for i in range(n - 1)])
    smoothed = _moving_average(scores, cfg.smooth_window)
    cut_after = np.nonzero(smoothed > cfg.tau)[0]
    starts = [0] + [int(i) + 1 for i in cut_after]
    ends = starts[1:] + [n]
    partition = SegmentPartition(tuple(zip(starts, ends)))
    validate_partition(partition, n)
    return partition


def smoothed_boundary_scores(shots: ShotSequence, cfg: VtsConfig) -> np.ndarray:
    """The smoothed score sequence segment_scenes thresholds (for reports)."""
    n = len(shots.shots)
    if n == 1:
        return np.zeros(0)
    scores = np.array([boundary_representation(shots, i, cfg).s for i in range(n - 1)])
    return _moving_average(scores, cfg.smooth_window)


def _moving_average(x: np.ndarray, width: int) -> np.ndarray:
    # Centered average, truncated at the ends of the score sequence.
    half = width // 2
    out = np.empty_like(x)
    for i in range(len(x)):
        lo = max(0, i - half)
        hi = min(len(x), i + half + 1)
        out[i] = x[lo:hi].mean()
    return out


def _unit_rows(data: np.ndarray, label: str) -> np.ndarray:
    arr = data.astype(np.float64)
    norms = np.linalg.norm(arr, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ZeroNormRow(f"{label} row {int(zero[0])} has zero norm")
    return arr / norms[:, None]


def _cos(a: np.ndarray, b: np.ndarray, label: str) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroNormRow(f"{label}: pooled window has zero norm")
    return float(np.dot(a, b) / (na * nb))


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    z = np.exp(x)
    return z / (1.0 + z)
