"""Subtropical (max-times) matrix factorization."""

from ._core import (
    DataError,
    UsageError,
    evaluate,
    factorize,
    maxtimes_product,
    objective,
    polymin,
    relative_error,
    sample_holdout,
    synth,
)

__all__ = [
    "DataError",
    "UsageError",
    "evaluate",
    "factorize",
    "maxtimes_product",
    "objective",
    "polymin",
    "relative_error",
    "sample_holdout",
    "synth",
]
