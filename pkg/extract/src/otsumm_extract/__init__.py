"""otsumm-extract: turn real videos and articles into otsumm input files."""

from .errors import DecodeFailure, EncoderUnavailable, ExtractError
from .extract import (
    ExtractionJob,
    extract_frame_features,
    extract_sentence_features,
    split_sentences,
    word_tokens,
)

__version__ = "0.1.0"

__all__ = [
    "DecodeFailure",
    "EncoderUnavailable",
    "ExtractError",
    "ExtractionJob",
    "extract_frame_features",
    "extract_sentence_features",
    "split_sentences",
    "word_tokens",
]
