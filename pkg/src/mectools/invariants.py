"""Kernel-dimension invariants of multipartite states.

For a proper subset ``T`` of the parties, the contraction map ``M_T`` sends
``w`` to ``sum_t v[a, t] w[t, b]``, summing over the ``T`` indices and leaving
the complement indices ``a`` (of ``v``) and ``b`` (of ``w``) free.  The
invariant attached to an antichain ``X`` is the dimension of the joint
kernel of ``{M_T : T in X}`` inside the full tensor space.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from ._validation import DimensionError
from .antichains import InvariantFamily, enumerate_family, mask_to_set, principal_antichain, set_to_mask
from .linalg import rank_float, rank_mod, row_basis_mod, singletons_and_principal
from .tensor import State


@dataclass(frozen=True, eq=False)
class ConstraintMatrix:
    """Dense matrix of ``M_T`` with rows ``(a, b)`` and columns in offset order."""

    data: np.ndarray
    subset: int
    dims: tuple[int, ...]
    backend: str
    prime: int | None
    state_id: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


@dataclass(frozen=True)
class InvariantVector:
    """Invariant values aligned with the canonical family order."""

    dims: tuple[int, ...]
    values: tuple[int, ...]
    family_hash: str = ""

    @property
    def principal(self) -> int:
        return self.values[-1]

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def to_json_dict(self) -> dict:
        return {"dims": list(self.dims), "values": list(self.values), "family_hash": self.family_hash}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data) -> "InvariantVector":
        return cls(tuple(data["dims"]), tuple(int(x) for x in data["values"]), data.get("family_hash", ""))


def _as_mask(T, n: int) -> int:
    mask = T if isinstance(T, (int, np.integer)) else set_to_mask(T)
    mask = int(mask)
    if not 0 < mask < (1 << n) - 1:
        raise ValueError(f"subset {mask_to_set(mask)} is not a nonempty proper subset of 1..{n}")
    return mask


def _split(mask: int, n: int) -> tuple[list[int], list[int]]:
    inside = [i for i in range(n) if mask >> i & 1]
    outside = [i for i in range(n) if not mask >> i & 1]
    return inside, outside


def _flattening(dense: np.ndarray, mask: int) -> np.ndarray:
    """``F_T[a, t] = v[a, t]`` with complement indices as rows."""
    inside, outside = _split(mask, dense.ndim)
    rows = math.prod(dense.shape[i] for i in outside)
    return np.transpose(dense, outside + inside).reshape(rows, -1)


def _expand(block: np.ndarray, dims: tuple[int, ...], mask: int) -> np.ndarray:
    """Tensor ``block`` (rows x |T|) with the identity on the complement slots.

    Row ``(k, b)`` / column ``c`` is ``block[k, c|_T]`` when ``c|_Tbar == b``;
    columns are returned in row-major offset order of the full space.
    """
    n = len(dims)
    inside, outside = _split(mask, n)
    free = math.prod(dims[i] for i in outside)
    if block.shape[0] == 0:
        return np.zeros((0, math.prod(dims)), dtype=block.dtype)
    big = np.kron(block, np.eye(free, dtype=block.dtype))
    order = inside + outside
    shaped = big.reshape([big.shape[0]] + [dims[i] for i in order])
    perm = [0] + [1 + order.index(i) for i in range(n)]
    return np.ascontiguousarray(np.transpose(shaped, perm).reshape(big.shape[0], -1))


def _state_id(state: State) -> str:
    return hashlib.sha1(state.to_json().encode()).hexdigest()[:12]


def constraint_matrix(state: State, T) -> ConstraintMatrix:
    """Full matrix of ``M_T``: ``(prod_{Tbar} d)^2`` rows, ``prod d`` columns."""
    mask = _as_mask(T, state.n)
    dense = state.to_dense()
    data = _expand(_flattening(dense, mask), state.dims, mask)
    return ConstraintMatrix(data, mask, state.dims, state.backend, state.prime, _state_id(state))


def kernel_dim(matrices, dims=None) -> int:
    """Dimension of the joint kernel of a stack of constraint matrices.

    ``dims`` is only needed for an empty stack, whose kernel is everything.
    """
    matrices = list(matrices)
    if not matrices:
        if dims is None:
            raise ValueError("an empty stack needs dims to know the ambient dimension")
        return math.prod(dims)
    backends = {(m.backend, m.prime) for m in matrices}
    if len(backends) != 1:
        raise ValueError(f"cannot stack matrices from different backends: {sorted(backends, key=str)}")
    cols = {m.data.shape[1] for m in matrices}
    if len(cols) != 1:
        raise DimensionError(f"column counts differ: {sorted(cols)}")
    backend, prime = backends.pop()
    stack = np.vstack([m.data for m in matrices])
    ncols = cols.pop()
    if backend == "fp":
        return ncols - rank_mod(stack, prime)
    return ncols - rank_float(stack)


class _Blocks:
    """Per-subset constraint rows for one state, reduced and cached."""

    def __init__(self, dense: np.ndarray, backend: str, prime: int | None):
        self.dense = dense
        self.dims = dense.shape
        self.backend = backend
        self.prime = prime
        self.total = dense.size
        self._rows: dict[int, np.ndarray] = {}
        self._flat_rank: dict[int, int] = {}

    def _rank(self, matrix) -> int:
        if self.backend == "fp":
            return rank_mod(matrix, self.prime)
        return rank_float(matrix)

    def flattening_rank(self, mask: int) -> int:
        if mask not in self._flat_rank:
            self._flat_rank[mask] = self._rank(_flattening(self.dense, mask))
        return self._flat_rank[mask]

    def rows(self, mask: int) -> np.ndarray:
        if mask not in self._rows:
            flat = _flattening(self.dense, mask)
            if self.backend == "fp":
                # ker(M_T) only depends on the row space of the flattening
                flat = row_basis_mod(flat, self.prime)
            self._rows[mask] = _expand(flat, self.dims, mask)
        return self._rows[mask]

    def kernel(self, antichain) -> int:
        if len(antichain) == 1:
            (mask,) = antichain
            inside, outside = _split(mask, len(self.dims))
            width = math.prod(self.dims[i] for i in inside)
            free = math.prod(self.dims[i] for i in outside)
            return (width - self.flattening_rank(mask)) * free
        stack = np.vstack([self.rows(mask) for mask in antichain])
        return self.total - self._rank(stack)


def _blocks(state: State) -> _Blocks:
    return _Blocks(state.to_dense(), state.backend, state.prime)


def dense_invariants(dense: np.ndarray, family: InvariantFamily, prime: int) -> tuple[int, ...]:
    """Invariant values of a dense GF(p) tensor (entries already reduced)."""
    if family.n == 3:
        # singletons then the principal antichain: the whole tripartite family
        return tuple(int(x) for x in singletons_and_principal(dense, prime))
    blocks = _Blocks(dense, "fp", prime)
    return tuple(blocks.kernel(ac) for ac in family.antichains)


def dense_principal(dense: np.ndarray, prime: int) -> int:
    return int(singletons_and_principal(dense, prime)[-1])


def _singleton_positions(family: InvariantFamily) -> list[int]:
    return [k for k, ac in enumerate(family.antichains) if len(ac) == 1 and ac[0] & (ac[0] - 1) == 0]


def dense_matches(dense: np.ndarray, family: InvariantFamily, prime: int, target, order: list | None = None) -> bool:
    """True iff the invariant vector equals ``target``; stops at the first mismatch.

    The singleton and principal values come from one fast kernel call.  The
    other antichains are tried in ``order`` (a mutable list of family
    positions); a failing position moves to the front so repeated calls
    reject quickly.
    """
    quick = singletons_and_principal(dense, prime)
    if quick[-1] != target[-1]:
        return False
    singles = _singleton_positions(family)
    if any(quick[i] != target[k] for i, k in enumerate(singles)):
        return False
    if family.n == 3:
        return True
    if order is None:
        done = set(singles) | {len(family) - 1}
        order = [k for k in range(len(family)) if k not in done]
    blocks = _Blocks(dense, "fp", prime)
    for pos, k in enumerate(order):
        if blocks.kernel(family.antichains[k]) != target[k]:
            order.insert(0, order.pop(pos))
            return False
    return True


def invariant_vector(state: State, family: InvariantFamily | None = None) -> InvariantVector:
    """Kernel dimensions of ``state`` for every antichain of the family."""
    if family is None:
        family = enumerate_family(state.n)
    if family.n != state.n:
        raise DimensionError(f"family is for n={family.n}, state has n={state.n}")
    blocks = _blocks(state)
    values = tuple(blocks.kernel(ac) for ac in family.antichains)
    return InvariantVector(state.dims, values, family.hash)


def principal_invariant(state: State) -> int:
    """Joint kernel dimension for ``{J_1, ..., J_n}`` only."""
    if state.backend == "fp":
        return dense_principal(state.to_dense(), state.prime)
    return _blocks(state).kernel(principal_antichain(state.n))


def reduced_bipartite_nullity(state: State, i: int) -> int:
    """Nullity of the mode-``i`` flattening, i.e. ``dim K_i`` inside ``V_i``."""
    if not 1 <= i <= state.n:
        raise ValueError(f"party {i} out of range 1..{state.n}")
    blocks = _blocks(state)
    return state.dims[i - 1] - blocks.flattening_rank(1 << (i - 1))
