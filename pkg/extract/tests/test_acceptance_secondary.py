"""Secondary acceptance: extractor outputs feed the core pipeline.

Emitted files must validate under the pipeline's reader, stay
row-parallel, and drive an end-to-end align run (invoked through the
installed CLI) without error on one sample clip + article.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from otsumm.model import read_embeddings

from otsumm_extract.cli import main as extract_main
from otsumm_extract.embfile import write_pgm_stack


@pytest.fixture
def sample_clip(tmp_path):
    """Two visually distinct blocks: dark sharp-ish frames then bright ones."""
    rng = np.random.default_rng(0)
    dark = [
        np.clip(rng.integers(0, 40, size=(8, 8)), 0, 255).astype(np.uint8) for _ in range(5)
    ]
    bright = [
        np.clip(rng.integers(215, 256, size=(8, 8)), 0, 255).astype(np.uint8)
        for _ in range(5)
    ]
    path = tmp_path / "clip.pgm"
    write_pgm_stack(dark + bright, path)
    return path


@pytest.fixture
def sample_article(tmp_path):
    path = tmp_path / "article.txt"
    path.write_text(
        "Rivers flooded the valley towns overnight. Rescue boats reached the "
        "flooded valley by morning. The championship match ended in penalties. "
        "Fans celebrated the penalty shootout win.",
        encoding="utf-8",
    )
    return path


def test_extractor_outputs_validate_and_align(sample_clip, sample_article, tmp_path):
    frames_emb = tmp_path / "frames.emb"
    raw_pgm = tmp_path / "raw.pgm"
    rc = extract_main(
        [
            "frames",
            "--input",
            str(sample_clip),
            "--output",
            str(frames_emb),
            "--raw-frames-out",
            str(raw_pgm),
        ]
    )
    assert rc == 0

    sents_txt = tmp_path / "sents.txt"
    sents_emb = tmp_path / "sents.emb"
    rc = extract_main(
        [
            "sentences",
            "--input",
            str(sample_article),
            "--out-text",
            str(sents_txt),
            "--out-emb",
            str(sents_emb),
        ]
    )
    assert rc == 0

    # Emitted embeddings validate under the pipeline's reader and stay
    # row-parallel with their text/frame sources.
    frames = read_embeddings(frames_emb)
    sents = read_embeddings(sents_emb)
    assert frames.rows == 10
    assert sents.rows == len(sents_txt.read_text().splitlines()) == 4
    assert frames.dims == sents.dims == 64

    manifest = tmp_path / "manifest.json"
    manifest.write_text(
        json.dumps(
            {
                "frame_embeddings_path": "frames.emb",
                "raw_frames_path": "raw.pgm",
                "sentence_texts_path": "sents.txt",
                "sentence_embeddings_path": "sents.emb",
            }
        ),
        encoding="utf-8",
    )
    report_path = tmp_path / "report.json"
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "otsumm",
            "align",
            str(manifest),
            "--out",
            str(report_path),
            "--plan-out",
            str(tmp_path / "plan.pgm"),
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    report = json.loads(report_path.read_text())
    assert report["chosen"]["distance"] >= 0.0
    assert report["pairs"]
    assert (tmp_path / "plan.pgm").read_bytes().startswith(b"P5")
    print("ACCEPTANCE PASS: extractor integration (validate + end-to-end align)")


def test_word_level_rows_feed_reader(tmp_path, sample_article):
    out_txt = tmp_path / "w.txt"
    out_emb = tmp_path / "w.emb"
    rc = extract_main(
        [
            "sentences",
            "--input",
            str(sample_article),
            "--out-text",
            str(out_txt),
            "--out-emb",
            str(out_emb),
            "--word-level",
        ]
    )
    assert rc == 0
    emb = read_embeddings(out_emb)
    assert emb.rows == len(out_txt.read_text().splitlines())
