"""Frame and text encoders.

The weight-free encoders (grayscale histograms for frames, hashed
character n-grams for text) are deterministic and always available, so
pipelines can run fully offline. Pretrained encoders (torchvision
backbones, sentence-transformers models) are registered by name and raise
EncoderUnavailable when the library or its weights cannot be loaded.

Frame and sentence embeddings must share a dimensionality for cross-domain
alignment; the defaults (hist64 / hash64) already match at 64.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import EncoderUnavailable

DEFAULT_FRAME_ENCODER = "hist64"
DEFAULT_TEXT_ENCODER = "hash64"


def encode_frames(frames: list[np.ndarray], encoder: str) -> np.ndarray:
    """One L2-normalized row per frame."""
    if encoder.startswith("hist"):
        bins = _parse_size(encoder, "hist")
        if 256 % bins != 0:
            raise EncoderUnavailable(f"histogram bin count must divide 256, got {bins}")
        rows = np.stack([_histogram(frame, bins) for frame in frames])
        return _l2_normalize(rows)
    if encoder in ("resnet101", "googlenet"):
        return _encode_frames_torchvision(frames, encoder)
    raise EncoderUnavailable(f"unknown frame encoder {encoder!r}")


def encode_texts(texts: list[str], encoder: str) -> np.ndarray:
    """One L2-normalized row per text item (sentence or token)."""
    if encoder.startswith("hash"):
        dims = _parse_size(encoder, "hash")
        rows = np.stack([_hash_features(t, dims) for t in texts])
        return _l2_normalize(rows)
    if encoder.startswith("sentence-transformers:"):
        return _encode_texts_sbert(texts, encoder.split(":", 1)[1])
    raise EncoderUnavailable(f"unknown text encoder {encoder!r}")


def _parse_size(name: str, prefix: str) -> int:
    try:
        size = int(name[len(prefix):])
    except ValueError:
        raise EncoderUnavailable(f"encoder {name!r} must end in an integer size") from None
    if size < 1:
        raise EncoderUnavailable(f"encoder size must be positive, got {size}")
    return size


def _histogram(frame: np.ndarray, bins: int) -> np.ndarray:
    width = 256 // bins
    return np.bincount((frame.astype(np.int64) // width).ravel(), minlength=bins).astype(
        np.float64
    )


def _hash_features(text: str, dims: int) -> np.ndarray:
    # Signed feature hashing of character trigrams; blake2b keeps the
    # mapping stable across processes and platforms.
    vec = np.zeros(dims, dtype=np.float64)
    padded = f"  {text.lower()} "
    for i in range(len(padded) - 2):
        gram = padded[i : i + 3].encode("utf-8")
        digest = hashlib.blake2b(gram, digest_size=8).digest()
        value = int.from_bytes(digest, "little")
        slot = value % dims
        sign = 1.0 if (value >> 63) & 1 else -1.0
        vec[slot] += sign
    if not np.any(vec):
        vec[0] = 1.0
    return vec


def _l2_normalize(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return rows / norms


def _encode_frames_torchvision(frames: list[np.ndarray], name: str) -> np.ndarray:
    try:
        import torch
        from torchvision import models, transforms
    except ImportError as exc:
        raise EncoderUnavailable(f"{name} needs torch and torchvision: {exc}") from exc
    try:
        if name == "resnet101":
            net = models.resnet101(weights=models.ResNet101_Weights.IMAGENET1K_V2)
        else:
            net = models.googlenet(weights=models.GoogLeNet_Weights.IMAGENET1K_V1)
    except Exception as exc:
        raise EncoderUnavailable(f"cannot load {name} weights: {exc}") from exc
    net.fc = torch.nn.Identity()
    net.eval()
    prep = transforms.Compose(
        [
            transforms.ToPILImage(),
            transforms.Resize(224),
            transforms.CenterCrop(224),
            transforms.ToTensor(),
            transforms.Normalize([0.485, 0.456, 0.406], [0.229, 0.224, 0.225]),
        ]
    )
    rows = []
    with torch.no_grad():
        for frame in frames:
            rgb = np.repeat(frame[:, :, None], 3, axis=2)
            rows.append(net(prep(rgb).unsqueeze(0)).squeeze(0).numpy().astype(np.float64))
    return _l2_normalize(np.stack(rows))


def _encode_texts_sbert(texts: list[str], model_name: str) -> np.ndarray:
    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as exc:
        raise EncoderUnavailable(f"sentence-transformers is not installed: {exc}") from exc
    try:
        model = SentenceTransformer(model_name)
    except Exception as exc:
        raise EncoderUnavailable(f"cannot load sentence model {model_name!r}: {exc}") from exc
    rows = model.encode(texts, convert_to_numpy=True).astype(np.float64)
    return _l2_normalize(rows)
