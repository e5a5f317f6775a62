"""Python bindings for the evminer evidence retrieval core."""

from ._core import (
    INDEX_FORMAT_VERSION,
    CorruptIndex,
    EmptyQuery,
    EvminerError,
    Index,
    InvalidArgument,
    VersionMismatch,
    bm25_idf,
    build_index,
    load_index,
    ndcg_at_k,
    porter_stem,
)

__all__ = [
    "INDEX_FORMAT_VERSION",
    "CorruptIndex",
    "EmptyQuery",
    "EvminerError",
    "Index",
    "InvalidArgument",
    "VersionMismatch",
    "bm25_idf",
    "build_index",
    "load_index",
    "ndcg_at_k",
    "porter_stem",
]
