"""otsumm: multimodal summary alignment via entropic optimal transport.

Segments a video's frame-embedding sequence and an article's sentences,
generates per-segment keyframe and sentence candidates, scores every
cross-domain candidate pair with optimal transport over embedding
sequences, and selects the minimum-distance pair as the joint summary.
"""

from .model import (
    CandidatePair,
    EmbeddingMatrix,
    FrameBuffer,
    Manifest,
    SegmentPartition,
    load_manifest,
    read_embeddings,
    validate_partition,
    write_embeddings,
)
from .ot import (
    CostMatrix,
    MarginalPair,
    SolverConfig,
    TransportPlan,
    algorithm1_distance,
    cosine_cost,
    lp_oracle,
    select_best_pair,
    sinkhorn_entropic,
    solve_alignment,
    uniform_marginals,
)
from .pipeline import AlignOutcome, PipelineConfig, resolve_config, run_align

__version__ = "0.1.0"

__all__ = [
    "AlignOutcome",
    "CandidatePair",
    "CostMatrix",
    "EmbeddingMatrix",
    "FrameBuffer",
    "Manifest",
    "MarginalPair",
    "PipelineConfig",
    "SegmentPartition",
    "SolverConfig",
    "TransportPlan",
    "algorithm1_distance",
    "cosine_cost",
    "load_manifest",
    "lp_oracle",
    "read_embeddings",
    "resolve_config",
    "run_align",
    "select_best_pair",
    "sinkhorn_entropic",
    "solve_alignment",
    "uniform_marginals",
    "validate_partition",
    "write_embeddings",
]
