"""Exception hierarchy shared by all hdcbench modules."""

from __future__ import annotations


class HDCError(Exception):
    """Base class for every error raised by hdcbench."""


class ConfigError(HDCError, ValueError):
    """Invalid architecture configuration (bad kind, dimension, density...)."""


class VectorTypeError(HDCError, TypeError):
    """Operands have the wrong payload, kind, or dimensionality."""


class UnsupportedOperationError(HDCError):
    """The requested operation does not exist for this architecture."""


class UndefinedSimilarityError(HDCError, ValueError):
    """Similarity is undefined, e.g. for a zero-norm real vector."""


class EmptyMemoryError(HDCError, LookupError):
    """Retrieval from an item memory that holds no entries."""


class DataError(HDCError, ValueError):
    """Malformed or unusable input data (files, corpora, descriptors)."""


class EncodingError(DataError):
    """Text contains characters outside the model alphabet."""
