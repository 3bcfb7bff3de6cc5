class ExtractError(Exception):
    """Base class for extraction failures."""


class EncoderUnavailable(ExtractError):
    """The requested encoder (or its weights) cannot be loaded."""


class DecodeFailure(ExtractError):
    """The input media cannot be decoded."""
