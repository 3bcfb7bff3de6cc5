"""CLI: otsumm-extract frames|sentences."""

from __future__ import annotations

import argparse
import sys

from .encoders import DEFAULT_FRAME_ENCODER, DEFAULT_TEXT_ENCODER
from .errors import ExtractError
from .extract import ExtractionJob, extract_frame_features, extract_sentence_features


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="otsumm-extract",
        description="Run encoders over media/articles and emit otsumm input files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fr = sub.add_parser("frames", help="frame features from a video, image dir, or PGM stack")
    fr.add_argument("--input", required=True)
    fr.add_argument("--output", required=True, help="embedding file to write")
    fr.add_argument("--encoder", default=DEFAULT_FRAME_ENCODER,
                    help="hist<bins>, resnet101, or googlenet")
    fr.add_argument("--rate", type=int, default=1, help="keep every rate-th frame")
    fr.add_argument("--raw-frames-out", default=None,
                    help="also write the sampled frames as a PGM stack")
    fr.set_defaults(func=_cmd_frames)

    se = sub.add_parser("sentences", help="sentence (or token) features from an article")
    se.add_argument("--input", required=True)
    se.add_argument("--out-text", required=True)
    se.add_argument("--out-emb", required=True)
    se.add_argument("--encoder", default=DEFAULT_TEXT_ENCODER,
                    help="hash<dims> or sentence-transformers:<model>")
    se.add_argument("--word-level", action="store_true",
                    help="one row per word token instead of per sentence")
    se.set_defaults(func=_cmd_sentences)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ExtractError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _cmd_frames(args) -> int:
    job = ExtractionJob(
        input_path=args.input, output_path=args.output, encoder=args.encoder, rate=args.rate
    )
    count = extract_frame_features(job, raw_frames_out=args.raw_frames_out)
    print(f"wrote {count} frame rows to {args.output}", file=sys.stderr)
    return 0


def _cmd_sentences(args) -> int:
    count = extract_sentence_features(
        args.input, args.out_text, args.out_emb, encoder=args.encoder, word_level=args.word_level
    )
    if count == 0:
        print("empty article: wrote empty text file, no embedding file", file=sys.stderr)
    else:
        unit = "token" if args.word_level else "sentence"
        print(f"wrote {count} {unit} rows to {args.out_emb}", file=sys.stderr)
    return 0
