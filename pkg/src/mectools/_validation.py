"""Input validation helpers shared by the library and the estimators."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_TOTAL_DIM = 2**31

# Default and confirmation primes for the exact backend.
PRIME = 2147483647
SECOND_PRIME = 2147483629


class DimensionError(ValueError):
    """Raised for malformed dimension vectors or mismatched shapes."""


def check_dims(dims: Iterable[int] | str, min_parties: int = 2) -> tuple[int, ...]:
    """Validate a dimension vector and return it as a tuple of ints.

    Accepts any iterable of positive integers, or a comma separated string
    such as ``"3,3,3"``.
    """
    if isinstance(dims, str):
        try:
            dims = [int(tok) for tok in dims.replace(" ", "").split(",") if tok]
        except ValueError as exc:
            raise DimensionError(f"cannot parse dimensions {dims!r}") from exc
    out = []
    for d in dims:
        if isinstance(d, (bool, np.bool_)) or int(d) != d:
            raise DimensionError(f"dimension {d!r} is not an integer")
        out.append(int(d))
    if len(out) < min_parties:
        raise DimensionError(f"need at least {min_parties} subsystems, got {len(out)}")
    if any(d < 1 for d in out):
        raise DimensionError(f"dimensions must be positive, got {tuple(out)}")
    if math.prod(out) > MAX_TOTAL_DIM:
        raise DimensionError(f"total dimension of {tuple(out)} exceeds 2^31")
    return tuple(out)


def check_index(index: Sequence[int], dims: Sequence[int]) -> tuple[int, ...]:
    """Validate a 1-based multi-index against ``dims``."""
    idx = tuple(int(j) for j in index)
    if len(idx) != len(dims):
        raise DimensionError(f"index {idx} has {len(idx)} slots, expected {len(dims)}")
    for j, d in zip(idx, dims):
        if not 1 <= j <= d:
            raise DimensionError(f"index {idx} out of range for dims {tuple(dims)}")
    return idx


@lru_cache(maxsize=16)
def _is_prime(p: int) -> bool:
    return p % 2 == 1 and all(p % f for f in range(3, math.isqrt(p) + 1, 2))


def check_prime(p: int) -> int:
    p = int(p)
    if p < 3 or p >= 2**31:
        raise ValueError("prime must lie in [3, 2^31) so products fit in int64")
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


def check_seed(seed) -> int | None:
    if seed is None:
        return None
    if isinstance(seed, (np.integer, int)) and not isinstance(seed, bool):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        return seed
    raise TypeError(f"seed must be an int, got {type(seed).__name__}")
