import json
from pathlib import Path

import numpy as np
import pytest

from otsumm.model import EmbeddingMatrix, write_embeddings


def em(rows) -> EmbeddingMatrix:
    return EmbeddingMatrix(np.asarray(rows, dtype=np.float32))


def unit_rows(rng: np.random.Generator, rows: int, dims: int) -> EmbeddingMatrix:
    data = rng.normal(size=(rows, dims))
    data /= np.linalg.norm(data, axis=1, keepdims=True)
    return EmbeddingMatrix(data.astype(np.float32))


@pytest.fixture
def planted_manifest(tmp_path: Path):
    """Manifest where exactly one (visual, textual) candidate pair aligns.

    Video: 5 frames of u0 then 5 frames of u1 (orthogonal) -> two scenes.
    Text: two topics; the second topic's sentences sit within 0.01 of u0,
    every other embedding is orthogonal to everything else. The planted
    winner is (visual segment 0, textual segment 1).
    """
    d = 6
    basis = np.eye(d, dtype=np.float64)
    frames = np.vstack([np.tile(basis[0], (5, 1)), np.tile(basis[1], (5, 1))])
    write_embeddings(em(frames), tmp_path / "frames.emb")

    rng = np.random.default_rng(42)
    near_u0 = basis[0] + 0.01 * rng.normal(size=(2, d))
    near_u0 /= np.linalg.norm(near_u0, axis=1, keepdims=True)
    sents = np.vstack([basis[2], basis[2], near_u0[0], near_u0[1]])
    write_embeddings(em(sents), tmp_path / "sents.emb")
    (tmp_path / "sents.txt").write_text(
        "Topic a one.\nTopic a two.\nTopic b one.\nTopic b two.\n", encoding="utf-8"
    )

    manifest = {
        "frame_embeddings_path": "frames.emb",
        "sentence_texts_path": "sents.txt",
        "sentence_embeddings_path": "sents.emb",
    }
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest), encoding="utf-8")
    return path
