import itertools

import numpy as np
import pytest

from otsumm.errors import BadK, DimMismatch, NoPositives, ZeroNorm
from otsumm.metrics import (
    RankedCandidates,
    average_precision,
    cosine_similarity,
    recall_at_k,
    rouge_l,
    rouge_n,
    tokenize,
)


# Brute-force LCS oracle: enumerate every subsequence of the shorter list
# and keep the longest that embeds in the other. Independent of the DP.


def is_subsequence(sub, seq):
    it = iter(seq)
    return all(tok in it for tok in sub)


def exhaustive_lcs(a, b):
    if len(a) > len(b):
        a, b = b, a
    best = 0
    for mask in range(1 << len(a)):
        sub = [a[i] for i in range(len(a)) if (mask >> i) & 1]
        if len(sub) > best and is_subsequence(sub, b):
            best = len(sub)
    return best


def ranked(scores, positives):
    return RankedCandidates(scores=scores, positives=frozenset(positives))


def rank_positions(n, positive_ranks):
    """n candidates scored so candidate i lands at rank i+1."""
    scores = {i: float(n - i) for i in range(n)}
    positives = {rank - 1 for rank in positive_ranks}
    return ranked(scores, positives)


class TestTokenize:
    def test_basic(self):
        assert tokenize("The cat!") == ["the", "cat"]

    def test_decimal_splits(self):
        assert tokenize("3.14") == ["3", "14"]

    def test_empty(self):
        assert tokenize("") == []
        assert tokenize("?!,;") == []


class TestRougeN:
    def test_identical(self):
        s = rouge_n("a b c", "a b c", 1)
        assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)

    def test_hand_unigram(self):
        s = rouge_n("the cat", "the cat sat", 1)
        assert s.precision == pytest.approx(1.0, abs=1e-12)
        assert s.recall == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert s.f1 == pytest.approx(0.8, abs=1e-12)

    def test_disjoint(self):
        s = rouge_n("a b", "c d", 1)
        assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)

    def test_bigram_clipping(self):
        s = rouge_n("a a a", "a a", 2)
        # Candidate bigrams: (a,a) x2; reference has one. Clipped overlap 1.
        assert s.precision == pytest.approx(0.5, abs=1e-12)
        assert s.recall == pytest.approx(1.0, abs=1e-12)

    def test_too_short_for_bigrams(self):
        s = rouge_n("a", "a b", 2)
        assert s.precision == 0.0 and s.f1 == 0.0

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            rouge_n("a", "a", 3)

    def test_bounded_and_full_overlap_iff_same_multiset(self):
        rng = np.random.default_rng(0)
        vocab = ["a", "b", "c"]
        for _ in range(200):
            cand = [vocab[i] for i in rng.integers(0, 3, size=rng.integers(1, 7))]
            ref = [vocab[i] for i in rng.integers(0, 3, size=rng.integers(1, 7))]
            s = rouge_n(" ".join(cand), " ".join(ref), 1)
            assert 0.0 <= s.f1 <= 1.0
            assert (s.f1 == 1.0) == (sorted(cand) == sorted(ref))


class TestRougeL:
    def test_hand_lcs(self):
        s = rouge_l("a c d", "a b c d")
        assert s.precision == pytest.approx(1.0, abs=1e-12)
        assert s.recall == pytest.approx(0.75, abs=1e-12)
        assert s.f1 == pytest.approx(6.0 / 7.0, abs=1e-12)

    def test_identical(self):
        assert rouge_l("x y z", "x y z").f1 == 1.0

    def test_empty_candidate(self):
        s = rouge_l("", "a b")
        assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)

    def test_matches_exhaustive_oracle_on_random_lists(self):
        rng = np.random.default_rng(1)
        vocab = ["a", "b", "c"]
        for _ in range(300):
            cand = [vocab[i] for i in rng.integers(0, 3, size=rng.integers(0, 9))]
            ref = [vocab[i] for i in rng.integers(0, 3, size=rng.integers(0, 9))]
            lcs = exhaustive_lcs(cand, ref)
            s = rouge_l(" ".join(cand), " ".join(ref))
            expect_p = lcs / len(cand) if cand else 0.0
            expect_r = lcs / len(ref) if ref else 0.0
            assert s.precision == pytest.approx(expect_p, abs=1e-12)
            assert s.recall == pytest.approx(expect_r, abs=1e-12)

    def test_matches_oracle_exhaustively_on_short_lists(self):
        # Every pair of lists up to length 3 over a 2-symbol alphabet.
        vocab = ["a", "b"]
        lists = [[]]
        for length in (1, 2, 3):
            lists.extend(list(p) for p in itertools.product(vocab, repeat=length))
        for cand in lists:
            for ref in lists:
                lcs = exhaustive_lcs(cand, ref)
                s = rouge_l(" ".join(cand), " ".join(ref))
                expect_p = lcs / len(cand) if cand else 0.0
                assert s.precision == pytest.approx(expect_p, abs=1e-12)


class TestAveragePrecision:
    def test_positive_at_rank_one(self):
        assert average_precision(rank_positions(10, [1])) == 1.0

    def test_positive_at_rank_two(self):
        assert average_precision(rank_positions(10, [2])) == 0.5

    def test_positives_at_ranks_one_and_three(self):
        assert average_precision(rank_positions(10, [1, 3])) == pytest.approx(5.0 / 6.0, abs=1e-15)

    def test_all_positives_is_one_regardless_of_order(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 10))
            scores = {i: float(rng.normal()) for i in range(n)}
            assert average_precision(ranked(scores, range(n))) == 1.0

    def test_perfect_ranking_is_one(self):
        r = rank_positions(8, [1, 2, 3])
        assert average_precision(r) == 1.0

    def test_ties_break_by_ascending_id(self):
        r = ranked({0: 1.0, 1: 1.0}, {0})
        assert average_precision(r) == 1.0
        r2 = ranked({0: 1.0, 1: 1.0}, {1})
        assert average_precision(r2) == 0.5

    def test_no_positives(self):
        with pytest.raises(NoPositives):
            average_precision(ranked({0: 1.0}, set()))


class TestRecallAtK:
    def test_rank_one_at_one(self):
        assert recall_at_k(rank_positions(10, [1]), 10, 1) == 1.0

    def test_rank_two(self):
        r = rank_positions(10, [2])
        assert recall_at_k(r, 10, 1) == 0.0
        assert recall_at_k(r, 10, 2) == 1.0

    def test_two_positives_half_recovered(self):
        assert recall_at_k(rank_positions(10, [1, 5]), 10, 2) == 0.5

    def test_bad_k(self):
        r = rank_positions(10, [1])
        with pytest.raises(BadK):
            recall_at_k(r, 10, 11)
        with pytest.raises(BadK):
            recall_at_k(r, 10, 0)
        with pytest.raises(BadK):
            recall_at_k(r, 9, 1)


class TestMonotoneInvariance:
    def test_ap_and_recall_invariant_under_monotone_transforms(self):
        rng = np.random.default_rng(3)
        transforms = (lambda x: 2.0 * x + 1.0, np.exp, lambda x: x**3)
        for _ in range(100):
            n = int(rng.integers(2, 12))
            scores = {i: float(v) for i, v in enumerate(rng.normal(size=n))}
            n_pos = int(rng.integers(1, n + 1))
            positives = set(rng.choice(n, size=n_pos, replace=False).tolist())
            base = ranked(scores, positives)
            k = int(rng.integers(1, n + 1))
            ap = average_precision(base)
            rk = recall_at_k(base, n, k)
            for tf in transforms:
                mapped = ranked({i: float(tf(v)) for i, v in scores.items()}, positives)
                assert average_precision(mapped) == pytest.approx(ap, abs=1e-15)
                assert recall_at_k(mapped, n, k) == pytest.approx(rk, abs=1e-15)


class TestCosineSimilarity:
    def test_identical(self):
        assert cosine_similarity([1.0, 2.0], [1.0, 2.0]) == pytest.approx(1.0, abs=1e-15)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_antipodal(self):
        assert cosine_similarity([1.0, 2.0], [-1.0, -2.0]) == pytest.approx(-1.0, abs=1e-15)

    def test_zero_norm(self):
        with pytest.raises(ZeroNorm):
            cosine_similarity([0.0, 0.0], [1.0, 0.0])

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            cosine_similarity([1.0], [1.0, 0.0])
