"""Evaluation metrics: ROUGE-1/2/L F1, average precision, recall at k, and
cosine similarity between feature vectors."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import BadK, DimMismatch, NoPositives, ZeroNorm

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "RougeScore":
        denom = precision + recall
        f1 = 2.0 * precision * recall / denom if denom > 0 else 0.0
        return cls(precision, recall, f1)


@dataclass(frozen=True)
class RankedCandidates:
    """Candidate scores plus the set of relevant candidate ids.

    Candidates are ranked by descending score with ties broken by ascending
    id, so ids must be mutually orderable.
    """

    scores: Mapping[Hashable, float]
    positives: frozenset

    def __post_init__(self) -> None:
        object.__setattr__(self, "positives", frozenset(self.positives))
        if len(self.scores) < 1:
            raise ValueError("need at least one candidate")
        missing = self.positives - set(self.scores)
        if missing:
            raise ValueError(f"positives not among candidates: {sorted(missing)!r}")

    def ranking(self) -> list:
        return [cid for cid, _ in sorted(self.scores.items(), key=lambda kv: (-kv[1], kv[0]))]


def tokenize(text: str) -> list[str]:
    """Lowercase, split on any non-alphanumeric run, drop empties."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> RougeScore:
    """Clipped n-gram overlap F1; n is 1 or 2."""
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    cand = _ngrams(tokenize(candidate), n)
    ref = _ngrams(tokenize(reference), n)
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    return RougeScore.from_pr(precision, recall)


def rouge_l(candidate: str, reference: str) -> RougeScore:
    """Longest-common-subsequence F1 over token sequences."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    lcs = _lcs_length(cand, ref)
    precision = lcs / len(cand) if cand else 0.0
    recall = lcs / len(ref) if ref else 0.0
    return RougeScore.from_pr(precision, recall)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for ai in a:
        cur = [0] * (len(b) + 1)
        for j, bj in enumerate(b, start=1):
            cur[j] = prev[j - 1] + 1 if ai == bj else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def average_precision(r: RankedCandidates) -> float:
    """Mean, over the positives, of precision at each positive's rank.

    The value is rational, so it is accumulated exactly and rounded once.
    """
    if not r.positives:
        raise NoPositives("ranking contains no positive candidates")
    ranking = r.ranking()
    hits = 0
    total = Fraction(0)
    for rank, cid in enumerate(ranking, start=1):
        if cid in r.positives:
            hits += 1
            total += Fraction(hits, rank)
    return float(total / len(r.positives))


def recall_at_k(r: RankedCandidates, n: int, k: int) -> float:
    """Fraction of positives ranked within the top k of n candidates."""
    if n != len(r.scores):
        raise BadK(f"n={n} but ranking holds {len(r.scores)} candidates")
    if not (1 <= k <= n):
        raise BadK(f"k={k} outside [1, {n}]")
    if not r.positives:
        raise NoPositives("ranking contains no positive candidates")
    top = set(r.ranking()[:k])
    return len(top & r.positives) / len(r.positives)


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """Inner product of the normalized vectors, in [-1, 1]."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape or av.ndim != 1:
        raise DimMismatch(f"shapes differ: {av.shape} vs {bv.shape}")
    na = np.linalg.norm(av)
    nb = np.linalg.norm(bv)
    if na == 0.0 or nb == 0.0:
        raise ZeroNorm("cosine similarity of a zero vector is undefined")
    return float(np.clip(np.dot(av, bv) / (na * nb), -1.0, 1.0))
