"""Per-segment summary candidates: attention-scored keyframes, the
unsupervised histogram/sharpness baseline, and centroid sentence selection.

The attention path evaluates the bilinear softmax scoring exactly as a
deterministic operation over supplied matrices (identity parameters and a
mean-embedding query by default). The unsupervised path clusters frames on
16-bin grayscale histograms and keeps the sharpest frame per cluster,
where sharpness is the variance of the 4-neighbor Laplacian response.
All clustering is seeded and bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadBinCount,
    DimMismatch,
    FrameTooSmall,
    KTooLarge,
    TopKTooLarge,
    WeightSumViolation,
)
from .model import EmbeddingMatrix, FrameBuffer, SegmentPartition

DEFAULT_HISTOGRAM_BINS = 16

_LAPLACIAN = np.array([[0, 1, 0], [1, -4, 1], [0, 1, 0]], dtype=np.float64)


@dataclass(frozen=True)
class AttentionParams:
    """Bilinear scoring parameters: a square matrix over the feature
    dimensionality plus an optional query state (defaults to the mean
    embedding at the call site)."""

    W_a: np.ndarray
    initial_state: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        w = np.asarray(self.W_a, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"W_a must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("W_a contains non-finite values")
        object.__setattr__(self, "W_a", w)
        if self.initial_state is not None:
            s = np.asarray(self.initial_state, dtype=np.float64)
            if s.ndim != 1:
                raise ValueError("initial_state must be a vector")
            object.__setattr__(self, "initial_state", s)

    @classmethod
    def identity(cls, dims: int) -> "AttentionParams":
        return cls(np.eye(dims))


@dataclass(frozen=True)
class KMeansResult:
    """Centroids, nearest-centroid assignments, final objective, and the
    per-iteration objective history (non-increasing by construction)."""

    centroids: np.ndarray
    assignments: np.ndarray
    objective: float
    iterations: int
    history: tuple[float, ...]


def attention_weights(E: EmbeddingMatrix, s_prev: np.ndarray, W_a: np.ndarray) -> np.ndarray:
    """Softmax of the bilinear scores rows(E) @ W_a @ s_prev.

    Computed with max-subtraction, so adding a constant to every score
    leaves the weights unchanged and the output always sums to one.
    """
    s_prev = np.asarray(s_prev, dtype=np.float64)
    W_a = np.asarray(W_a, dtype=np.float64)
    if W_a.ndim != 2 or W_a.shape[0] != W_a.shape[1]:
        raise DimMismatch(f"W_a must be square, got shape {W_a.shape}")
    if W_a.shape[0] != E.dims or s_prev.shape != (E.dims,):
        raise DimMismatch(
            f"dims disagree: embeddings {E.dims}, W_a {W_a.shape[0]}, state {s_prev.shape}"
        )
    beta = E.data.astype(np.float64) @ W_a @ s_prev
    shifted = beta - beta.max()
    expd = np.exp(shifted)
    return expd / expd.sum()


def attention_context(E: EmbeddingMatrix, alpha: Sequence[float]) -> np.ndarray:
    """Convex combination of embedding rows under the given weights."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (E.rows,):
        raise DimMismatch(f"{alpha.shape[0] if alpha.ndim == 1 else alpha.shape} weights for {E.rows} rows")
    if abs(alpha.sum() - 1.0) > 1e-9:
        raise WeightSumViolation(f"weights sum to {alpha.sum()!r}, expected 1 within 1e-9")
    return alpha @ E.data.astype(np.float64)


def select_keyframes_attention(
    segment_frames: EmbeddingMatrix, p: AttentionParams, top_k: int
) -> list[int]:
    """Rank frames by attention weight against the (default mean) query and
    keep the top_k, ties to the lower index."""
    if top_k > segment_frames.rows:
        raise TopKTooLarge(f"top_k={top_k} exceeds {segment_frames.rows} frames")
    if top_k < 1:
        raise TopKTooLarge("top_k must be at least 1")
    query = p.initial_state
    if query is None:
        query = segment_frames.data.astype(np.float64).mean(axis=0)
    alpha = attention_weights(segment_frames, query, p.W_a)
    order = np.argsort(-alpha, kind="stable")
    return [int(i) for i in order[:top_k]]


def grayscale_histogram(f: FrameBuffer, bins: int = DEFAULT_HISTOGRAM_BINS) -> np.ndarray:
    """Pixel counts over equal-width intensity bins; bins must divide 256."""
    if bins < 1 or 256 % bins != 0:
        raise BadBinCount(f"bins must divide 256, got {bins}")
    width = 256 // bins
    indices = f.pixels.astype(np.int64) // width
    return np.bincount(indices.ravel(), minlength=bins).astype(np.int64)


def laplacian_variance(f: FrameBuffer) -> float:
    """Population variance of the 4-neighbor Laplacian over interior pixels.

    Invariant to adding a constant intensity since the kernel sums to zero.
    """
    if f.width < 3 or f.height < 3:
        raise FrameTooSmall(f"need at least 3x3 for the Laplacian, got {f.width}x{f.height}")
    px = f.pixels.astype(np.float64)
    resp = (
        px[:-2, 1:-1] + px[2:, 1:-1] + px[1:-1, :-2] + px[1:-1, 2:] - 4.0 * px[1:-1, 1:-1]
    )
    return float(resp.var())


def kmeans(points: EmbeddingMatrix, k: int, seed: int, max_iters: int = 100) -> KMeansResult:
    """Lloyd's algorithm with seeded k-means++ initialization.

    Stops at an assignment fixpoint or after max_iters. The recorded
    objective history is non-increasing and the final assignment maps every
    point to its nearest centroid; a fixed seed gives bit-identical output.
    """
    X = points.data.astype(np.float64)
    n = points.rows
    if k > n:
        raise KTooLarge(f"k={k} exceeds {n} points")
    if k < 1:
        raise KTooLarge("k must be at least 1")
    rng = np.random.default_rng(seed)
    centroids = _plus_plus_init(X, k, rng)
    prev_assign: Optional[np.ndarray] = None
    history: list[float] = []
    assign = np.zeros(n, dtype=np.intp)
    iterations = 0
    for iterations in range(1, max_iters + 1):
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assign = np.argmin(d2, axis=1)
        history.append(float(d2[np.arange(n), assign].sum()))
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        prev_assign = assign
        for c in range(k):
            members = X[assign == c]
            if len(members):
                centroids[c] = members.mean(axis=0)
    return KMeansResult(
        centroids=centroids,
        assignments=assign,
        objective=history[-1],
        iterations=iterations,
        history=tuple(history),
    )


def _plus_plus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    chosen = [int(rng.integers(n))]
    d2 = ((X - X[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        total = d2.sum()
        if total == 0.0:
            # All remaining mass collapsed; take the lowest unchosen index.
            taken = set(chosen)
            nxt = next(i for i in range(n) if i not in taken)
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((X - X[nxt]) ** 2).sum(axis=1))
    return X[chosen].copy()


def select_keyframes_unsupervised(
    frames: Sequence[FrameBuffer], k: int, seed: int
) -> list[int]:
    """Cluster frames on normalized 16-bin histograms, then keep the frame
    with the highest Laplacian variance per cluster (ties to the lower
    index). Returns ascending frame indices."""
    if k > len(frames):
        raise KTooLarge(f"k={k} exceeds {len(frames)} frames")
    hists = np.stack(
        [grayscale_histogram(f, DEFAULT_HISTOGRAM_BINS).astype(np.float64) for f in frames]
    )
    hists /= hists.sum(axis=1, keepdims=True)
    result = kmeans(EmbeddingMatrix(hists.astype(np.float32)), k, seed)
    sharpness = np.array([laplacian_variance(f) for f in frames])
    picks = []
    for c in range(k):
        members = np.nonzero(result.assignments == c)[0]
        if members.size == 0:
            continue
        best = members[int(np.argmax(sharpness[members]))]
        picks.append(int(best))
    return sorted(picks)


def select_sentences_centroid(
    texts_embeddings: EmbeddingMatrix,
    per_segment: SegmentPartition,
    per_k: int,
    seed: int = 0,
) -> list[list[int]]:
    """Within each segment, cluster sentence embeddings with
    k = min(per_k, segment size) and emit the sentence nearest each
    centroid (Euclidean, ties to the lower index). Indices are global and
    ascending per segment."""
    if per_k < 1:
        raise KTooLarge("per_k must be at least 1")
    out: list[list[int]] = []
    emb = texts_embeddings.data.astype(np.float64)
    for start, end in per_segment:
        sub = emb[start:end]
        k = min(per_k, end - start)
        result = kmeans(EmbeddingMatrix(sub.astype(np.float32)), k, seed)
        picks = []
        for c in range(k):
            members = np.nonzero(result.assignments == c)[0]
            if members.size == 0:
                continue
            dists = np.linalg.norm(sub[members] - result.centroids[c], axis=1)
            picks.append(start + int(members[int(np.argmin(dists))]))
        out.append(sorted(picks))
    return out
