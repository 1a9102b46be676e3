"""Similarity-grouped pattern-vector indexing for RDF quad datasets.

The heavy lifting lives in the C++ extension module; this package re-exports
its public names.
"""

from ._riq import (
    ConfigError,
    CorruptIndexError,
    Index,
    NQuadsError,
    Query,
    QuerySyntaxError,
    VersionMismatchError,
    build_index,
    fingerprint,
    format_query,
    generate_dataset,
    load_index,
    parse_nquads,
    parse_query,
)

__all__ = [
    "ConfigError",
    "CorruptIndexError",
    "Index",
    "NQuadsError",
    "Query",
    "QuerySyntaxError",
    "VersionMismatchError",
    "build_index",
    "fingerprint",
    "format_query",
    "generate_dataset",
    "load_index",
    "parse_nquads",
    "parse_query",
]
