"""Manifest-driven end-to-end alignment runs.

Resolves the effective configuration (CLI flag > manifest override >
built-in default), segments both modalities, generates per-segment
candidates, solves the pairwise transport distances, and assembles the
deterministic run report. Wall-clock timings never enter the report so
identical runs stay byte-identical; they are returned separately for
logging.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass
from typing import Optional

from .errors import EmptyCandidateSet
from .model import (
    CandidatePair,
    EmbeddingMatrix,
    Manifest,
    SegmentPartition,
    read_embeddings,
)
from .ot import SOLVERS, SolverConfig, TransportPlan, select_best_pair, solve_alignment
from .pgm import read_pgm_frames
from .summarize import (
    AttentionParams,
    select_keyframes_attention,
    select_keyframes_unsupervised,
    select_sentences_centroid,
)
from .text import SentenceSet, segment_text
from .video import VtsConfig, detect_shots, segment_scenes


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of an end-to-end run, echoed verbatim into the report."""

    cut_threshold: float = 0.5
    omega_b: int = 2
    tau: float = 0.5
    smooth_window: int = 3
    diff_gain: float = 4.0
    rel_gain: float = 4.0
    threshold_multiplier: float = 0.5
    k: int = 1
    lam: float = 0.1
    beta: float = 0.5
    outer: int = 100
    inner: int = 1
    tol: float = 1e-6
    max_iters: int = 10_000
    seed: int = 0
    solver: str = "sinkhorn"
    mode: str = "global"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.mode not in ("global", "per-segment"):
            raise ValueError(f"mode must be 'global' or 'per-segment', got {self.mode!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def vts(self) -> VtsConfig:
        return VtsConfig(
            omega_b=self.omega_b,
            tau=self.tau,
            smooth_window=self.smooth_window,
            diff_gain=self.diff_gain,
            rel_gain=self.rel_gain,
        )

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            lam=self.lam,
            beta=self.beta,
            outer_iters=self.outer,
            inner_iters=self.inner,
            tol=self.tol,
            max_iters=self.max_iters,
        )


# Manifest override keys -> config field; "lambda" is the JSON/CLI spelling
# of the entropic weight.
_KEY_ALIASES = {"lambda": "lam", "outer": "outer", "inner": "inner"}


def resolve_config(
    manifest_overrides: Optional[dict] = None, cli_overrides: Optional[dict] = None
) -> PipelineConfig:
    """Layer manifest overrides then CLI values over the defaults."""
    values: dict = {}
    for layer in (manifest_overrides or {}, cli_overrides or {}):
        for key, value in layer.items():
            if value is None:
                continue
            field = _KEY_ALIASES.get(key, key)
            values[field] = value
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config field '{sorted(unknown)[0]}'")
    return PipelineConfig(**values)


def config_echo(cfg: PipelineConfig) -> dict:
    # workers is an execution detail that never affects results, so it stays
    # out of the echo: reports are byte-identical across worker counts.
    out = {}
    for f in dataclasses.fields(PipelineConfig):
        if f.name == "workers":
            continue
        name = "lambda" if f.name == "lam" else f.name
        out[name] = getattr(cfg, f.name)
    return out


@dataclass
class AlignOutcome:
    report: dict
    best_plan: TransportPlan
    timings: dict


def run_align(manifest: Manifest, cfg: PipelineConfig) -> AlignOutcome:
    """Segment, select candidates, align every pair, and pick the winner."""
    t_start = time.perf_counter()
    frames = read_embeddings(manifest.resolve(manifest.frame_embeddings_path))
    sentence_path = manifest.resolve(manifest.sentence_texts_path)
    texts = [line for line in sentence_path.read_text(encoding="utf-8").splitlines() if line.strip()]
    sentence_emb = read_embeddings(manifest.resolve(manifest.sentence_embeddings_path))
    if len(texts) != sentence_emb.rows:
        raise ValueError(
            f"sentence file has {len(texts)} sentences but embeddings declare "
            f"{sentence_emb.rows} rows"
        )
    raw_frames = None
    if manifest.raw_frames_path is not None:
        raw_frames = read_pgm_frames(manifest.resolve(manifest.raw_frames_path))
        if len(raw_frames) != frames.rows:
            raise ValueError(
                f"raw frames file has {len(raw_frames)} images but embeddings declare "
                f"{frames.rows} rows"
            )
    t_loaded = time.perf_counter()

    shots = detect_shots(frames, cfg.cut_threshold)
    scenes = segment_scenes(shots, cfg.vts())
    scene_frame_ranges = [
        (shots.shots[s][0], shots.shots[e - 1][1]) for s, e in scenes
    ]
    keyframes: list[list[int]] = []
    for seg_id, (f_lo, f_hi) in enumerate(scene_frame_ranges):
        count = f_hi - f_lo
        kk = min(cfg.k, count)
        if raw_frames is not None:
            local = select_keyframes_unsupervised(raw_frames[f_lo:f_hi], kk, cfg.seed)
        else:
            local = sorted(
                select_keyframes_attention(
                    EmbeddingMatrix(frames.data[f_lo:f_hi]),
                    AttentionParams.identity(frames.dims),
                    kk,
                )
            )
        keyframes.append([f_lo + i for i in local])

    sentences = SentenceSet(tuple(texts), sentence_emb)
    text_segments = segment_text(sentences, cfg.threshold_multiplier)
    sentence_picks = select_sentences_centroid(sentence_emb, text_segments, cfg.k, cfg.seed)
    t_segmented = time.perf_counter()

    pairs = [
        CandidatePair(
            visual_candidate=frames.take_rows(keyframes[vi]),
            textual_candidate=sentence_emb.take_rows(sentence_picks[ti]),
            visual_segment_id=vi,
            textual_segment_id=ti,
        )
        for vi in range(len(scenes))
        for ti in range(len(text_segments))
    ]
    if not pairs:
        raise EmptyCandidateSet("segmentation produced no candidate pairs")
    solver_cfg = cfg.solver_config()
    best = select_best_pair(pairs, cfg.solver, solver_cfg, workers=cfg.workers)
    t_aligned = time.perf_counter()

    best_plan = solve_alignment(
        best.visual_candidate, best.textual_candidate, cfg.solver, solver_cfg
    )
    report = _build_report(
        cfg, shots, scenes, scene_frame_ranges, keyframes, texts, text_segments,
        sentence_picks, pairs, best,
    )
    timings = {
        "load_s": t_loaded - t_start,
        "segment_s": t_segmented - t_loaded,
        "align_s": t_aligned - t_segmented,
        "total_s": time.perf_counter() - t_start,
    }
    return AlignOutcome(report=report, best_plan=best_plan, timings=timings)


def _build_report(
    cfg: PipelineConfig,
    shots,
    scenes: SegmentPartition,
    scene_frame_ranges,
    keyframes,
    texts,
    text_segments: SegmentPartition,
    sentence_picks,
    pairs: list[CandidatePair],
    best: CandidatePair,
) -> dict:
    table = [
        {
            "visual_segment": p.visual_segment_id,
            "textual_segment": p.textual_segment_id,
            "distance": float(p.distance),
        }
        for p in pairs
    ]
    # Self-consistency: the chosen pair must hold the table minimum under
    # the (distance, visual id, textual id) order.
    expected = min(
        table, key=lambda r: (r["distance"], r["visual_segment"], r["textual_segment"])
    )
    if (expected["visual_segment"], expected["textual_segment"]) != (
        best.visual_segment_id,
        best.textual_segment_id,
    ):
        raise RuntimeError("chosen pair does not match the distance-table minimum")

    report = {
        "config": config_echo(cfg),
        "video": {
            "shots": [[s, e] for s, e in shots.shots],
            "scenes": [[s, e] for s, e in scenes],
            "scene_frame_ranges": [[s, e] for s, e in scene_frame_ranges],
            "keyframes": [list(map(int, ks)) for ks in keyframes],
        },
        "text": {
            "segments": [[s, e] for s, e in text_segments],
            "sentences": [list(map(int, ss)) for ss in sentence_picks],
        },
        "pairs": table,
        "chosen": {
            "visual_segment": best.visual_segment_id,
            "keyframes": list(map(int, keyframes[best.visual_segment_id])),
            "textual_segment": best.textual_segment_id,
            "sentences": list(map(int, sentence_picks[best.textual_segment_id])),
            "sentence_texts": [texts[i] for i in sentence_picks[best.textual_segment_id]],
            "distance": float(best.distance),
        },
    }
    if cfg.mode == "per-segment":
        by_text: dict[int, dict] = {}
        for row in table:
            ti = row["textual_segment"]
            cur = by_text.get(ti)
            key = (row["distance"], row["visual_segment"], row["textual_segment"])
            if cur is None or key < (cur["distance"], cur["visual_segment"], cur["textual_segment"]):
                by_text[ti] = row
        report["per_segment"] = [
            {
                "textual_segment": ti,
                "visual_segment": by_text[ti]["visual_segment"],
                "keyframes": list(map(int, keyframes[by_text[ti]["visual_segment"]])),
                "sentences": list(map(int, sentence_picks[ti])),
                "distance": by_text[ti]["distance"],
            }
            for ti in sorted(by_text)
        ]
    return report
