"""Topic segmentation of a sentence sequence by depth scoring.

Sentence embeddings arrive precomputed; each inter-sentence gap gets a
similarity from mean-pooled windows on both sides, and a gap's depth is
how far its similarity dips below the peaks on either side. Gaps whose
depth clears mean + multiplier * stddev become segment boundaries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import TooFewSentences, ZeroNormRow
from .model import EmbeddingMatrix, SegmentPartition, validate_partition

DEFAULT_THRESHOLD_MULTIPLIER = 0.5

_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")


@dataclass(frozen=True)
class SentenceSet:
    """Ordered sentence strings with one embedding row per sentence."""

    texts: tuple[str, ...]
    embeddings: EmbeddingMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "texts", tuple(self.texts))
        if len(self.texts) < 1:
            raise ValueError("sentence set must contain at least one sentence")
        if len(self.texts) != self.embeddings.rows:
            raise ValueError(
                f"{len(self.texts)} sentences but {self.embeddings.rows} embedding rows"
            )

    def __len__(self) -> int:
        return len(self.texts)


def split_sentences(document: str) -> list[str]:
    """Split on '.', '!', '?' followed by whitespace or end of text.

    Decimal numbers survive because the terminator must be followed by
    whitespace; pieces are trimmed and empties dropped.
    """
    sentences = []
    start = 0
    for match in _SENTENCE_END.finditer(document):
        piece = document[start : match.end()].strip()
        if piece:
            sentences.append(piece)
        start = match.end()
    tail = document[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def depth_scores(s: SentenceSet) -> list[float]:
    """Depth at each of the n-1 gaps.

    Gap i sits between sentences i and i+1; its similarity compares
    mean-pooled windows of w sentences per side, w = min(2, i+1, n-1-i),
    so both windows always have equal width. depth(i) adds the drops from
    the running similarity maxima on the left and right of the gap.
    """
    n = len(s)
    if n < 2:
        raise TooFewSentences(f"need at least 2 sentences, got {n}")
    emb = s.embeddings.data.astype(np.float64)
    sims = np.empty(n - 1)
    for i in range(n - 1):
        w = min(2, i + 1, n - 1 - i)
        left = emb[i - w + 1 : i + 1].mean(axis=0)
        right = emb[i + 1 : i + 1 + w].mean(axis=0)
        sims[i] = _cos(left, right, f"gap {i}")
    peaks_left = np.maximum.accumulate(sims)
    peaks_right = np.maximum.accumulate(sims[::-1])[::-1]
    depths = np.maximum(0.0, peaks_left - sims) + np.maximum(0.0, peaks_right - sims)
    return [float(d) for d in depths]


def segment_text(
    s: SentenceSet, threshold_multiplier: float = DEFAULT_THRESHOLD_MULTIPLIER
) -> SegmentPartition:
    """Cut at gaps whose depth exceeds mean + multiplier * stddev.

    Zero depth spread means a uniform document: no boundaries.
    """
    n = len(s)
    if n == 1:
        return SegmentPartition(((0, 1),))
    depths = np.array(depth_scores(s))
    std = float(depths.std())
    if std == 0.0:
        cut_after: list[int] = []
    else:
        threshold = float(depths.mean()) + threshold_multiplier * std
        cut_after = [int(i) for i in np.nonzero(depths > threshold)[0]]
    starts = [0] + [i + 1 for i in cut_after]
    ends = starts[1:] + [n]
    partition = SegmentPartition(tuple(zip(starts, ends)))
    validate_partition(partition, n)
    return partition


def _cos(a: np.ndarray, b: np.ndarray, label: str) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroNormRow(f"{label}: pooled window has zero norm")
    return float(np.dot(a, b) / (na * nb))
