"""Command-line pipeline.

Subcommands: segment-video, segment-text, align, evaluate. All outputs are
JSON (or PGM/CSV for plan exports) and byte-deterministic for fixed inputs,
flags, and seed. Exit codes: 0 success, 2 input or validation error,
3 empty candidate set.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import EmptyCandidateSet, OtsummError
from .metrics import (
    RankedCandidates,
    average_precision,
    cosine_similarity,
    recall_at_k,
    rouge_l,
    rouge_n,
)
from .model import load_manifest, read_embeddings
from .pgm import export_plan_heatmap
from .pipeline import resolve_config, run_align
from .text import SentenceSet, segment_text
from .video import detect_shots, segment_scenes, smoothed_boundary_scores


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EmptyCandidateSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OtsummError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otsumm",
        description="Segment, summarize, and align a video/article pair via optimal transport.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sv = sub.add_parser("segment-video", help="split a frame-embedding sequence into scenes")
    sv.add_argument("--frames", required=True, help="SCCSEMB1 frame embeddings")
    sv.add_argument("--cut-threshold", type=float, default=None)
    sv.add_argument("--omega-b", type=int, default=None)
    sv.add_argument("--tau", type=float, default=None)
    sv.add_argument("--smooth-window", type=int, default=None)
    sv.add_argument("--diff-gain", type=float, default=None)
    sv.add_argument("--rel-gain", type=float, default=None)
    sv.add_argument("--out", default=None, help="report path (default stdout)")
    sv.set_defaults(func=_cmd_segment_video)

    st = sub.add_parser("segment-text", help="split a sentence sequence into topical segments")
    st.add_argument("--sentences", required=True, help="one sentence per line")
    st.add_argument("--sent-emb", required=True, help="SCCSEMB1 sentence embeddings")
    st.add_argument("--threshold-multiplier", type=float, default=None)
    st.add_argument("--out", default=None)
    st.set_defaults(func=_cmd_segment_text)

    al = sub.add_parser("align", help="end-to-end manifest run")
    al.add_argument("manifest", help="JSON manifest path")
    al.add_argument("--solver", choices=("sinkhorn", "alg1"), default=None)
    al.add_argument("--mode", choices=("global", "per-segment"), default=None)
    al.add_argument("--lambda", dest="lam", type=float, default=None)
    al.add_argument("--beta", type=float, default=None)
    al.add_argument("--outer", type=int, default=None)
    al.add_argument("--inner", type=int, default=None)
    al.add_argument("--tol", type=float, default=None)
    al.add_argument("--seed", type=int, default=None)
    al.add_argument("--k", type=int, default=None, help="candidates per segment")
    al.add_argument("--cut-threshold", type=float, default=None)
    al.add_argument("--omega-b", type=int, default=None)
    al.add_argument("--tau", type=float, default=None)
    al.add_argument("--smooth-window", type=int, default=None)
    al.add_argument("--diff-gain", type=float, default=None)
    al.add_argument("--rel-gain", type=float, default=None)
    al.add_argument("--threshold-multiplier", type=float, default=None)
    al.add_argument("--workers", type=int, default=None)
    al.add_argument("--plan-out", default=None, help="winning plan as .pgm or .csv")
    al.add_argument("--out", default=None, help="report path (default stdout)")
    al.set_defaults(func=_cmd_align)

    ev = sub.add_parser("evaluate", help="scoring utilities")
    evsub = ev.add_subparsers(dest="metric", required=True)

    rg = evsub.add_parser("rouge", help="ROUGE-1/2/L F1 of candidate vs reference text files")
    rg.add_argument("--candidate", required=True)
    rg.add_argument("--reference", required=True)
    rg.add_argument("--out", default=None)
    rg.set_defaults(func=_cmd_eval_rouge)

    mp = evsub.add_parser("map", help="mean average precision over a ranking file")
    mp.add_argument("--ranking", required=True)
    mp.add_argument("--out", default=None)
    mp.set_defaults(func=_cmd_eval_map)

    rc = evsub.add_parser("recall", help="recall at position k over a ranking file")
    rc.add_argument("--ranking", required=True)
    rc.add_argument("--k", type=int, required=True)
    rc.add_argument("--out", default=None)
    rc.set_defaults(func=_cmd_eval_recall)

    cs = evsub.add_parser("cos", help="row-paired cosine similarity of two embedding files")
    cs.add_argument("--a", required=True)
    cs.add_argument("--b", required=True)
    cs.add_argument("--out", default=None)
    cs.set_defaults(func=_cmd_eval_cos)

    return parser


def _emit(report: dict, out: str | None) -> None:
    blob = json.dumps(report, indent=2) + "\n"
    if out is None:
        sys.stdout.write(blob)
    else:
        Path(out).write_text(blob, encoding="utf-8")


def _cmd_segment_video(args) -> int:
    cli = {
        "cut_threshold": args.cut_threshold,
        "omega_b": args.omega_b,
        "tau": args.tau,
        "smooth_window": args.smooth_window,
        "diff_gain": args.diff_gain,
        "rel_gain": args.rel_gain,
    }
    cfg = resolve_config(cli_overrides=cli)
    frames = read_embeddings(args.frames)
    shots = detect_shots(frames, cfg.cut_threshold)
    vts = cfg.vts()
    scenes = segment_scenes(shots, vts)
    smoothed = smoothed_boundary_scores(shots, vts)
    report = {
        "config": {
            "cut_threshold": cfg.cut_threshold,
            "omega_b": cfg.omega_b,
            "tau": cfg.tau,
            "smooth_window": cfg.smooth_window,
            "diff_gain": cfg.diff_gain,
            "rel_gain": cfg.rel_gain,
        },
        "frames": frames.rows,
        "shots": [[s, e] for s, e in shots.shots],
        "smoothed_scores": [float(x) for x in smoothed],
        "segments": [[s, e] for s, e in scenes],
    }
    _emit(report, args.out)
    return 0


def _cmd_segment_text(args) -> int:
    multiplier = args.threshold_multiplier
    if multiplier is None:
        multiplier = resolve_config().threshold_multiplier
    texts = [
        line
        for line in Path(args.sentences).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    emb = read_embeddings(args.sent_emb)
    if len(texts) != emb.rows:
        raise ValueError(
            f"sentence file has {len(texts)} sentences but embeddings declare {emb.rows} rows"
        )
    sentences = SentenceSet(tuple(texts), emb)
    partition = segment_text(sentences, multiplier)
    report = {
        "config": {"threshold_multiplier": multiplier},
        "sentences": len(texts),
        "segments": [[s, e] for s, e in partition],
    }
    _emit(report, args.out)
    return 0


def _cmd_align(args) -> int:
    manifest = load_manifest(args.manifest)
    cli = {
        "solver": args.solver,
        "mode": args.mode,
        "lambda": args.lam,
        "beta": args.beta,
        "outer": args.outer,
        "inner": args.inner,
        "tol": args.tol,
        "seed": args.seed,
        "k": args.k,
        "cut_threshold": args.cut_threshold,
        "omega_b": args.omega_b,
        "tau": args.tau,
        "smooth_window": args.smooth_window,
        "diff_gain": args.diff_gain,
        "rel_gain": args.rel_gain,
        "threshold_multiplier": args.threshold_multiplier,
        "workers": args.workers,
    }
    cfg = resolve_config(manifest.overrides, cli)
    outcome = run_align(manifest, cfg)
    if args.plan_out is not None:
        export_plan_heatmap(outcome.best_plan, args.plan_out)
    _emit(outcome.report, args.out)
    timings = " ".join(f"{k}={v:.3f}" for k, v in outcome.timings.items())
    print(f"align done: {timings}", file=sys.stderr)
    return 0


def _cmd_eval_rouge(args) -> int:
    candidate = Path(args.candidate).read_text(encoding="utf-8")
    reference = Path(args.reference).read_text(encoding="utf-8")
    report = {}
    for name, score in (
        ("rouge_1", rouge_n(candidate, reference, 1)),
        ("rouge_2", rouge_n(candidate, reference, 2)),
        ("rouge_l", rouge_l(candidate, reference)),
    ):
        report[name] = {
            "precision": score.precision,
            "recall": score.recall,
            "f1": score.f1,
        }
    _emit(report, args.out)
    return 0


def _load_rankings(path: str) -> list[RankedCandidates]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = raw if isinstance(raw, list) else [raw]
    rankings = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "scores" not in entry or "positives" not in entry:
            raise ValueError(f"ranking entry {i} must have 'scores' and 'positives' fields")
        scores = entry["scores"]
        if not isinstance(scores, dict):
            raise ValueError(f"ranking entry {i}: 'scores' must map candidate id to score")
        rankings.append(
            RankedCandidates(
                scores={str(k): float(v) for k, v in scores.items()},
                positives=frozenset(str(p) for p in entry["positives"]),
            )
        )
    return rankings


def _cmd_eval_map(args) -> int:
    rankings = _load_rankings(args.ranking)
    aps = [average_precision(r) for r in rankings]
    report = {"average_precision": aps, "map": float(np.mean(aps))}
    _emit(report, args.out)
    return 0


def _cmd_eval_recall(args) -> int:
    rankings = _load_rankings(args.ranking)
    recalls = [recall_at_k(r, len(r.scores), args.k) for r in rankings]
    report = {
        "k": args.k,
        "recall_at_k": recalls,
        "mean": float(np.mean(recalls)),
    }
    _emit(report, args.out)
    return 0


def _cmd_eval_cos(args) -> int:
    a = read_embeddings(args.a)
    b = read_embeddings(args.b)
    if a.rows != b.rows or a.dims != b.dims:
        raise ValueError(
            f"embedding files disagree: {a.rows}x{a.dims} vs {b.rows}x{b.dims}"
        )
    per_row = [cosine_similarity(a.data[i], b.data[i]) for i in range(a.rows)]
    report = {"per_row": per_row, "mean": float(np.mean(per_row))}
    _emit(report, args.out)
    return 0
