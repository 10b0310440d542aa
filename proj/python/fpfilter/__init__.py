"""Derived floating-point filters and staged robust predicates."""

from ._fpfilter import (
    Error,
    Expr,
    StagedPredicate,
    builtin,
    builtin_names,
    derive,
    eval_naive,
    filter_constants,
    oracle_sign,
    parse,
    phi,
    torture,
)

__all__ = [
    "Error",
    "Expr",
    "StagedPredicate",
    "builtin",
    "builtin_names",
    "derive",
    "eval_naive",
    "filter_constants",
    "oracle_sign",
    "orient2d",
    "parse",
    "phi",
    "torture",
]

_orient2d = None


def orient2d(a, b, c):
    """Exact orientation of three points: +1 left turn, -1 right turn, 0 collinear."""
    global _orient2d
    if _orient2d is None:
        _orient2d = StagedPredicate("orient2d", "safe")
    return _orient2d([a[0], a[1], b[0], b[1], c[0], c[1]])
