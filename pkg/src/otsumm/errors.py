"""Exception types raised across the pipeline.

Every error that maps to a CLI failure derives from :class:`OtsummError`;
the CLI turns these into exit code 2 (input/validation) except
:class:`EmptyCandidateSet`, which exits 3.
"""


class OtsummError(Exception):
    """Base class for all pipeline errors."""


# Embedding file format


class BadMagic(OtsummError):
    """File does not start with the expected magic bytes."""


class TruncatedFile(OtsummError):
    """File ends before the payload declared in its header."""


class NonFiniteValue(OtsummError):
    """A NaN or infinity was found in an embedding payload."""


class IoFailure(OtsummError):
    """An OS-level write failure."""


# PGM frame format


class BadHeader(OtsummError):
    """Malformed PGM header; message names the byte offset."""


class DepthUnsupported(OtsummError):
    """PGM maxval exceeds 8-bit depth."""


# Partitions


class GapDetected(OtsummError):
    """Partition ranges do not cover the index space exactly."""


class OverlapDetected(OtsummError):
    """Two partition ranges intersect."""


class EmptySegment(OtsummError):
    """A partition range is empty."""


# Linear algebra / optimal transport


class DimMismatch(OtsummError):
    """Operands disagree on feature dimensionality."""


class ZeroNormRow(OtsummError):
    """A row with zero Euclidean norm where a direction is required."""


class ZeroNorm(OtsummError):
    """A vector with zero Euclidean norm where a direction is required."""


class ZeroSize(OtsummError):
    """A marginal of size zero was requested."""


class NumericalUnderflow(OtsummError):
    """The Gibbs kernel exp(-C/lambda) vanished in scaling mode."""


class DivisionUnderflow(OtsummError):
    """A scaling denominator fell to zero inside the proximal solver."""


class TooLarge(OtsummError):
    """Instance exceeds the exact oracle's size cap."""


class EmptyCandidateSet(OtsummError):
    """No candidate pairs to align."""


# Segmentation


class IndexOutOfRange(OtsummError):
    """Boundary index outside the valid range."""


class TooFewSentences(OtsummError):
    """Depth scoring needs at least two sentences."""


# Summarization


class WeightSumViolation(OtsummError):
    """Attention weights do not sum to one."""


class TopKTooLarge(OtsummError):
    """More items requested than available."""


class BadBinCount(OtsummError):
    """Histogram bin count must divide 256."""


class FrameTooSmall(OtsummError):
    """Frame smaller than the Laplacian kernel."""


class KTooLarge(OtsummError):
    """More clusters requested than points."""


# Metrics


class NoPositives(OtsummError):
    """Ranking has no relevant candidates."""


class BadK(OtsummError):
    """Recall cutoff outside [1, n]."""
