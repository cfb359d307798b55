"""Vector symbolic architecture benchmark harness.

Eleven VSA kinds share one interface: random vectors, similarity,
bundling, binding, unbinding and permutation.  On top of that sit item
memories, analogical reasoning, the capacity experiments, n-gram language
recognition and sequence-based place recognition.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .algebra import (
    Accumulator,
    bind,
    bundle,
    permute,
    recover_key,
    thin,
    traits,
    unbind,
)
from .errors import (
    ConfigError,
    DataError,
    EmptyMemoryError,
    EncodingError,
    HDCError,
    UndefinedSimilarityError,
    UnsupportedOperationError,
    VectorTypeError,
)
from .item_memory import ItemMemory, populate_random
from .similarity import similarity, similarity_matrix
from .spaces import Hypervector, SeededRng, VsaConfig, VsaKind, random_vector, random_vectors

__all__ = [
    "Accumulator",
    "ConfigError",
    "DataError",
    "EmptyMemoryError",
    "EncodingError",
    "HDCError",
    "Hypervector",
    "ItemMemory",
    "SeededRng",
    "UndefinedSimilarityError",
    "UnsupportedOperationError",
    "VectorTypeError",
    "VsaConfig",
    "VsaKind",
    "bind",
    "bundle",
    "permute",
    "populate_random",
    "random_vector",
    "random_vectors",
    "recover_key",
    "similarity",
    "similarity_matrix",
    "thin",
    "traits",
    "unbind",
    "__version__",
]
