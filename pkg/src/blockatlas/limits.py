"""Enumeration bounds, overridable through the BLOCKATLAS_MAX_RANK env var.

The variable names a rank: symbol enumeration is allowed up to that rank and
partition enumeration up to size rank + 1 (a rank-n label in the linear
families is a partition of n + 1).  Unset or unparsable values fall back to
the defaults below.
"""

from __future__ import annotations

import os

DEFAULT_PARTITION_SIZE = 30
DEFAULT_SYMBOL_RANK = 10

_ENV_VAR = "BLOCKATLAS_MAX_RANK"


def _env_rank() -> int | None:
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value >= 1 else None


def partition_size_bound() -> int:
    v = _env_rank()
    return DEFAULT_PARTITION_SIZE if v is None else v + 1


def symbol_rank_bound() -> int:
    v = _env_rank()
    return DEFAULT_SYMBOL_RANK if v is None else v
