"""Dimension vectors, multi-indices, supports and coefficient states.

Indices are 1-based, matching the usual ``v_{j_1,...,j_n}`` notation, and are
linearised row-major with the last index running fastest.  A :class:`State`
never stores a zero coefficient, so its support is exactly its key set.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from ._validation import (
    PRIME,
    DimensionError,
    check_dims,
    check_index,
    check_prime,
)

BACKENDS = ("fp", "c64")


def total_dim(dims) -> int:
    """Return the dimension of the full tensor space, ``prod(d_i)``."""
    return math.prod(check_dims(dims))


def offset(index, dims) -> int:
    """Row-major offset of a 1-based multi-index."""
    dims = check_dims(dims)
    idx = check_index(index, dims)
    k = 0
    for j, d in zip(idx, dims):
        k = k * d + (j - 1)
    return k


def multi_index(k: int, dims) -> tuple[int, ...]:
    """Inverse of :func:`offset`."""
    dims = check_dims(dims)
    k = int(k)
    if not 0 <= k < math.prod(dims):
        raise DimensionError(f"offset {k} out of range for dims {dims}")
    out = []
    for d in reversed(dims):
        k, r = divmod(k, d)
        out.append(r + 1)
    return tuple(reversed(out))


def all_indices(dims) -> Iterator[tuple[int, ...]]:
    """All 1-based multi-indices in offset order."""
    return itertools.product(*(range(1, d + 1) for d in check_dims(dims)))


@dataclass(frozen=True)
class Support:
    """Set of nonzero coordinates of a state; ``length`` is its size."""

    dims: tuple[int, ...]
    positions: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        dims = check_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(
            self, "positions", frozenset(check_index(p, dims) for p in self.positions)
        )

    @classmethod
    def full(cls, dims) -> "Support":
        dims = check_dims(dims)
        return cls(dims, frozenset(all_indices(dims)))

    @classmethod
    def empty(cls, dims) -> "Support":
        return cls(check_dims(dims), frozenset())

    @classmethod
    def from_offsets(cls, dims, offsets: Iterable[int]) -> "Support":
        dims = check_dims(dims)
        return cls(dims, frozenset(multi_index(k, dims) for k in offsets))

    @property
    def length(self) -> int:
        return len(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __contains__(self, index) -> bool:
        return tuple(index) in self.positions

    def offsets(self) -> list[int]:
        """Sorted row-major offsets of the positions."""
        return sorted(offset(p, self.dims) for p in self.positions)

    def sorted_positions(self) -> list[tuple[int, ...]]:
        return sorted(self.positions)

    def mask(self) -> np.ndarray:
        """Boolean tensor of shape ``dims`` marking the support."""
        out = np.zeros(self.dims, dtype=bool)
        for p in self.positions:
            out[tuple(j - 1 for j in p)] = True
        return out

    def sort_key(self) -> tuple:
        return (self.length, tuple(self.offsets()))

    def to_list(self) -> list[list[int]]:
        return [list(p) for p in self.sorted_positions()]


@dataclass(frozen=True, eq=False)
class State:
    """Coefficients ``v_{j_1..j_n}`` over GF(p) (``"fp"``) or complex floats (``"c64"``)."""

    dims: tuple[int, ...]
    coeffs: Mapping[tuple[int, ...], object]
    backend: str = "fp"
    prime: int | None = PRIME

    def __post_init__(self):
        dims = check_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; expected one of {BACKENDS}")
        clean = {}
        if self.backend == "fp":
            p = check_prime(self.prime)
            object.__setattr__(self, "prime", p)
            for idx, val in self.coeffs.items():
                if isinstance(val, complex):
                    raise ValueError("complex coefficients need backend='c64'")
                val = int(val) % p
                if val:
                    clean[check_index(idx, dims)] = val
        else:
            object.__setattr__(self, "prime", None)
            for idx, val in self.coeffs.items():
                val = complex(val)
                if val != 0:
                    clean[check_index(idx, dims)] = val
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, dims, backend="fp", prime=PRIME) -> "State":
        return cls(dims, {}, backend, prime)

    @classmethod
    def from_dense(cls, array, backend=None, prime=PRIME) -> "State":
        """Build a state from a dense coefficient tensor (indices become 1-based)."""
        arr = np.asarray(array)
        if backend is None:
            backend = "c64" if np.iscomplexobj(arr) or arr.dtype.kind == "f" else "fp"
        coeffs = {}
        for pos in zip(*np.nonzero(arr)):
            val = arr[pos]
            coeffs[tuple(int(j) + 1 for j in pos)] = int(val) if backend == "fp" else complex(val)
        return cls(arr.shape, coeffs, backend, prime)

    @classmethod
    def from_support(cls, support: Support, value=1, prime=PRIME) -> "State":
        """Prime-field state with a constant coefficient on ``support``."""
        return cls(support.dims, {p: value for p in support.positions}, "fp", prime)

    # -- views ------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def support(self) -> Support:
        return Support(self.dims, frozenset(self.coeffs))

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def to_dense(self) -> np.ndarray:
        """Dense tensor of shape ``dims`` (int64 residues or complex128)."""
        dtype = np.int64 if self.backend == "fp" else np.complex128
        out = np.zeros(self.dims, dtype=dtype)
        for idx, val in self.coeffs.items():
            out[tuple(j - 1 for j in idx)] = val
        return out

    def permute(self, perm) -> "State":
        """Reorder tensor factors: slot ``k`` of the result is slot ``perm[k]`` of ``self``."""
        perm = tuple(int(i) for i in perm)
        if sorted(perm) != list(range(self.n)):
            raise ValueError(f"{perm} is not a permutation of range({self.n})")
        dims = tuple(self.dims[i] for i in perm)
        coeffs = {tuple(idx[i] for i in perm): v for idx, v in self.coeffs.items()}
        return State(dims, coeffs, self.backend, self.prime)

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.backend == other.backend
            and self.prime == other.prime
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.dims, self.backend, self.prime, tuple(self.coeffs.items())))

    # -- serialisation ----------------------------------------------------
    def to_json_dict(self) -> dict:
        if self.backend == "fp":
            coeffs = [{"idx": list(i), "val": v} for i, v in self.coeffs.items()]
        else:
            coeffs = [{"idx": list(i), "re": v.real, "im": v.imag} for i, v in self.coeffs.items()]
        return {"dims": list(self.dims), "backend": self.backend, "prime": self.prime, "coeffs": coeffs}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "State":
        try:
            dims = data["dims"]
            backend = data.get("backend", "fp")
            entries = data["coeffs"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed state JSON: {exc}") from exc
        coeffs = {}
        for entry in entries:
            idx = tuple(entry["idx"])
            if backend == "fp":
                coeffs[idx] = int(entry["val"])
            else:
                coeffs[idx] = complex(entry.get("re", 0.0), entry.get("im", 0.0))
        prime = data.get("prime") or PRIME
        return cls(dims, coeffs, backend, prime)

    @classmethod
    def from_json(cls, text: str) -> "State":
        return cls.from_json_dict(json.loads(text))


def random_values(rng: np.random.Generator, size: int, prime: int = PRIME) -> np.ndarray:
    """Uniform nonzero residues in ``[1, prime-1]``."""
    return rng.integers(1, prime, size=size, dtype=np.int64)


def random_state(support: Support, seed=None, prime: int = PRIME, backend: str = "fp") -> State:
    """Assign independent uniform nonzero values to every position of ``support``.

    Positions are visited in offset order, so the result depends only on
    ``(support, seed, prime)``.  The complex backend draws standard complex
    normals instead.
    """
    rng = np.random.default_rng(seed)
    positions = sorted(support.positions, key=lambda p: offset(p, support.dims))
    if backend == "fp":
        vals = random_values(rng, len(positions), prime)
        return State(support.dims, dict(zip(positions, vals.tolist())), "fp", prime)
    if backend == "c64":
        vals = rng.standard_normal(len(positions)) + 1j * rng.standard_normal(len(positions))
        return State(support.dims, dict(zip(positions, vals.tolist())), "c64", None)
    raise ValueError(f"unknown backend {backend!r}")


def truncate(state: State, new_dims) -> State:
    """Keep the coefficients whose every index satisfies ``j_i <= new_dims[i]``."""
    new_dims = check_dims(new_dims)
    if len(new_dims) != len(state.dims):
        raise DimensionError(f"cannot truncate {state.dims} to {new_dims}: different number of parties")
    if any(a > b for a, b in zip(new_dims, state.dims)):
        raise DimensionError(f"truncation {new_dims} exceeds {state.dims}")
    coeffs = {
        idx: v for idx, v in state.coeffs.items() if all(j <= d for j, d in zip(idx, new_dims))
    }
    return State(new_dims, coeffs, state.backend, state.prime)
