"""Extraction jobs: media/articles in, pipeline input files out."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import media
from .embfile import write_embeddings, write_pgm_stack
from .encoders import DEFAULT_FRAME_ENCODER, DEFAULT_TEXT_ENCODER, encode_frames, encode_texts

_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")
_WORD_SPLIT = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class ExtractionJob:
    """One media-to-embeddings run."""

    input_path: str
    output_path: str
    encoder: str = DEFAULT_FRAME_ENCODER
    rate: int = 1


def split_sentences(document: str) -> list[str]:
    """Sentence split rule shared with the pipeline: cut after '.', '!' or
    '?' followed by whitespace or end of text; decimals survive."""
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


def word_tokens(document: str) -> list[str]:
    return [t for t in _WORD_SPLIT.split(document.lower()) if t]


def extract_frame_features(job: ExtractionJob, raw_frames_out: Optional[str] = None) -> int:
    """Decode, sample, encode, and write one embedding row per kept frame.

    Returns the row count. With raw_frames_out set, the sampled frames are
    also re-emitted as a concatenated binary PGM stack for the pipeline's
    unsupervised keyframe path.
    """
    frames = media.sample_frames(media.decode_frames(job.input_path), job.rate)
    rows = encode_frames(frames, job.encoder)
    write_embeddings(rows, job.output_path)
    if raw_frames_out is not None:
        write_pgm_stack(frames, raw_frames_out)
    return len(frames)


def extract_sentence_features(
    article_path: str | Path,
    out_text: str | Path,
    out_emb: str | Path,
    encoder: str = DEFAULT_TEXT_ENCODER,
    word_level: bool = False,
) -> int:
    """Split an article, encode each unit, and write parallel files.

    Units are sentences by default or lowercase word tokens with
    word_level=True; the text file holds one unit per line, parallel to the
    embedding rows. An empty article writes an empty text file and no
    embedding file (a zero-row embedding file would not validate), and
    returns 0.
    """
    document = Path(article_path).read_text(encoding="utf-8")
    units = word_tokens(document) if word_level else split_sentences(document)
    Path(out_text).write_text("".join(u + "\n" for u in units), encoding="utf-8")
    if not units:
        return 0
    rows = encode_texts(units, encoder)
    write_embeddings(rows, out_emb)
    return len(units)
