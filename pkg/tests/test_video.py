import numpy as np
import pytest

from otsumm.errors import IndexOutOfRange
from otsumm.model import validate_partition
from otsumm.video import (
    BoundaryScore,
    VtsConfig,
    boundary_representation,
    detect_shots,
    segment_scenes,
)

from conftest import em, unit_rows

E1 = [1.0, 0.0, 0.0]
E2 = [0.0, 1.0, 0.0]


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


class TestDetectShots:
    def test_identical_frames_one_shot(self):
        shots = detect_shots(em([E1] * 10), 0.5)
        assert shots.shots == ((0, 10),)

    def test_orthogonal_blocks_split(self):
        frames = em([E1] * 5 + [E2] * 5)
        shots = detect_shots(frames, 0.5)
        assert shots.shots == ((0, 5), (5, 10))

    def test_alternating_frames_all_singletons(self):
        frames = em([E1, E2] * 3)
        # Every consecutive distance is exactly 1 > 0.5.
        shots = detect_shots(frames, 0.5)
        assert shots.shots == tuple((i, i + 1) for i in range(6))

    def test_threshold_above_two_never_cuts(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            frames = unit_rows(rng, int(rng.integers(1, 12)), 4)
            assert detect_shots(frames, 2.0001).shots == ((0, frames.rows),)

    def test_features_are_unit_norm(self):
        rng = np.random.default_rng(1)
        shots = detect_shots(unit_rows(rng, 10, 5), 0.8)
        norms = np.linalg.norm(shots.shot_features.data.astype(np.float64), axis=1)
        assert np.allclose(norms, 1.0, atol=1e-6)

    def test_zero_norm_frame_named(self):
        from otsumm.errors import ZeroNormRow

        with pytest.raises(ZeroNormRow, match="row 1"):
            detect_shots(em([[1.0, 0.0], [0.0, 0.0]]), 0.5)

    def test_shot_ranges_partition_the_frames(self):
        rng = np.random.default_rng(2)
        shots = detect_shots(unit_rows(rng, 9, 4), 0.7)
        validate_partition(shots.shots, 9)


class TestVtsConfig:
    def test_rejects_even_smooth_window(self):
        with pytest.raises(ValueError):
            VtsConfig(smooth_window=4)

    def test_rejects_bad_tau(self):
        with pytest.raises(ValueError):
            VtsConfig(tau=0.0)
        with pytest.raises(ValueError):
            VtsConfig(tau=1.0)

    def test_rejects_zero_omega(self):
        with pytest.raises(ValueError):
            VtsConfig(omega_b=0)


class TestBoundaryRepresentation:
    def test_identical_shots(self):
        shots = detect_shots(em([E1] * 4), 2.5)
        # One shot only; build a 4-shot sequence by hand instead.
        shots = _shots_from_features([E1, E1, E1, E1])
        score = boundary_representation(shots, 1, VtsConfig())
        assert score.diff_score == pytest.approx(0.0, abs=1e-12)
        assert score.rel_score == pytest.approx(1.0, abs=1e-12)
        assert score.s == pytest.approx(sigmoid(-4.0), abs=1e-12)
        assert score.s == pytest.approx(0.01798620996209156, abs=1e-12)

    def test_orthogonal_windows_cohesive_sides(self):
        # Before window is orthogonal to the after window while each side is
        # internally identical: diff = 1, rel = 1, so the combiner yields
        # sigmoid(4*(1-1) + 4*(1-1)) = 0.5 under the documented formula.
        shots = _shots_from_features([E1, E1, E2, E2])
        score = boundary_representation(shots, 1, VtsConfig(omega_b=2))
        assert score.diff_score == pytest.approx(1.0, abs=1e-12)
        assert score.rel_score == pytest.approx(1.0, abs=1e-12)
        assert score.s == pytest.approx(0.5, abs=1e-12)

    def test_omega_one_hard_cut(self):
        shots = _shots_from_features([E1, E2])
        score = boundary_representation(shots, 0, VtsConfig(omega_b=1))
        assert score.diff_score == pytest.approx(1.0, abs=1e-12)
        assert score.rel_score == pytest.approx(0.0, abs=1e-12)
        assert score.s == pytest.approx(sigmoid(4.0), abs=1e-12)

    def test_windows_clamped_at_edges(self):
        shots = _shots_from_features([E1, E2])
        score = boundary_representation(shots, 0, VtsConfig(omega_b=3))
        assert isinstance(score, BoundaryScore)

    def test_index_out_of_range(self):
        shots = _shots_from_features([E1, E2])
        with pytest.raises(IndexOutOfRange):
            boundary_representation(shots, 1, VtsConfig())


class TestSegmentScenes:
    def test_single_shot(self):
        shots = _shots_from_features([E1])
        assert tuple(segment_scenes(shots, VtsConfig())) == ((0, 1),)

    def test_two_orthogonal_blocks_split(self):
        frames = em([E1] * 5 + [E2] * 5)
        shots = detect_shots(frames, 0.5)
        partition = segment_scenes(shots, VtsConfig(tau=0.5))
        assert tuple(partition) == ((0, 1), (1, 2))

    def test_three_orthogonal_blocks_split(self):
        frames = em([E1] * 4 + [E2] * 4 + [[0.0, 0.0, 1.0]] * 4)
        shots = detect_shots(frames, 0.5)
        partition = segment_scenes(shots, VtsConfig(tau=0.5))
        assert tuple(partition) == ((0, 1), (1, 2), (2, 3))

    def test_identical_content_single_segment(self):
        shots = _shots_from_features([E1] * 6)
        partition = segment_scenes(shots, VtsConfig(tau=0.5))
        assert tuple(partition) == ((0, 6),)

    def test_partitions_always_validate(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 15))
            shots = detect_shots(unit_rows(rng, n, 4), float(rng.uniform(0.2, 1.5)))
            partition = segment_scenes(shots, VtsConfig(tau=float(rng.uniform(0.05, 0.95))))
            validate_partition(partition, len(shots.shots))

    def test_raising_tau_never_adds_segments(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            shots = detect_shots(unit_rows(rng, int(rng.integers(2, 15)), 4), 0.6)
            counts = [
                len(segment_scenes(shots, VtsConfig(tau=tau)))
                for tau in (0.05, 0.2, 0.4, 0.6, 0.8, 0.95)
            ]
            assert counts == sorted(counts, reverse=True)

    def test_coordinate_permutation_leaves_scores_unchanged(self):
        rng = np.random.default_rng(9)
        frames = unit_rows(rng, 8, 6)
        perm = rng.permutation(6)
        permuted = em(frames.data[:, perm])
        cfg = VtsConfig()
        a = detect_shots(frames, 0.6)
        b = detect_shots(permuted, 0.6)
        assert a.shots == b.shots
        for i in range(len(a.shots) - 1):
            sa = boundary_representation(a, i, cfg)
            sb = boundary_representation(b, i, cfg)
            assert sa.s == sb.s

    def test_random_rotation_leaves_partition_unchanged(self):
        rng = np.random.default_rng(10)
        for _ in range(5):
            frames = unit_rows(rng, 10, 5)
            q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
            rotated = em(frames.data.astype(np.float64) @ q)
            cfg = VtsConfig()
            a = detect_shots(frames, 0.6)
            b = detect_shots(rotated, 0.6)
            assert a.shots == b.shots
            for i in range(len(a.shots) - 1):
                sa = boundary_representation(a, i, cfg)
                sb = boundary_representation(b, i, cfg)
                assert sa.s == pytest.approx(sb.s, abs=1e-5)


def _shots_from_features(features):
    from otsumm.video import ShotSequence

    ranges = tuple((i, i + 1) for i in range(len(features)))
    return ShotSequence(ranges, em(features))
