"""Rank and row-echelon routines over GF(p) and over complex floats."""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _echelon_mod_inplace(a, p):
    # Fraction-free elimination: row_i <- piv * row_i - a_ic * row_r (mod p).
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(c, n):
                t = a[r, k]
                a[r, k] = a[piv, k]
                a[piv, k] = t
        pv = a[r, c]
        for i in range(r + 1, m):
            f = a[i, c]
            if f != 0:
                for k in range(c, n):
                    a[i, k] = (pv * a[i, k] - f * a[r, k]) % p
        r += 1
    return r


@numba.njit(cache=True)
def _singletons_and_principal(flat, dims, p, out):
    # out[i] = kernel of the mode-i contraction, out[n] = joint kernel of all
    # "contract everything but slot i" maps; both at the full-space level.
    n = dims.shape[0]
    size = flat.shape[0]
    strides = np.empty(n, np.int64)
    s = 1
    for k in range(n - 1, -1, -1):
        strides[k] = s
        s *= dims[k]
    total_rows = 0
    for i in range(n):
        total_rows += dims[i] * dims[i]
    stack = np.zeros((total_rows, size), np.int64)
    row = 0
    for i in range(n):
        di = dims[i]
        width = size // di
        base = np.empty(width, np.int64)
        for t in range(width):
            rem = t
            off = 0
            for k in range(n - 1, -1, -1):
                if k == i:
                    continue
                off += (rem % dims[k]) * strides[k]
                rem //= dims[k]
            base[t] = off
        flat_i = np.empty((di, width), np.int64)
        for a in range(di):
            for t in range(width):
                flat_i[a, t] = flat[a * strides[i] + base[t]]
        r = _echelon_mod_inplace(flat_i, p)
        out[i] = (di - r) * width
        for q in range(r):
            for b in range(di):
                for t in range(width):
                    stack[row, b * strides[i] + base[t]] = flat_i[q, t]
                row += 1
    out[n] = size - _echelon_mod_inplace(stack[:row], p)


def singletons_and_principal(dense, p: int) -> np.ndarray:
    """Singleton invariants followed by the principal invariant of a GF(p) tensor.

    Entries of ``dense`` must already lie in ``[0, p)``.
    """
    dims = np.asarray(dense.shape, dtype=np.int64)
    out = np.empty(len(dims) + 1, dtype=np.int64)
    flat = np.ascontiguousarray(dense, dtype=np.int64).reshape(-1)
    _singletons_and_principal(flat, dims, np.int64(p), out)
    return out


def _as_residues(matrix, p: int) -> np.ndarray:
    a = np.asarray(matrix)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if a.dtype.kind not in "iub":
        raise TypeError(f"exact rank needs an integer matrix, got dtype {a.dtype}")
    return np.ascontiguousarray(np.mod(a.astype(np.int64), p))


def rank_mod(matrix, p: int) -> int:
    """Rank of an integer matrix over GF(p), ``p < 2^31``."""
    a = _as_residues(matrix, p)
    if a.size == 0:
        return 0
    return int(_echelon_mod_inplace(a, np.int64(p)))


def row_basis_mod(matrix, p: int) -> np.ndarray:
    """Rows spanning the same GF(p) row space, as an upper echelon block."""
    a = _as_residues(matrix, p)
    if a.size == 0:
        return a[:0]
    r = _echelon_mod_inplace(a, np.int64(p))
    return a[:r]


def nullity_mod(matrix, p: int) -> int:
    """Column count minus rank over GF(p)."""
    return np.shape(matrix)[1] - rank_mod(matrix, p)


def float_tolerance(matrix) -> float:
    """Heuristic threshold ``rows * cols * eps * max|a_ij|``."""
    a = np.asarray(matrix)
    if a.size == 0:
        return 0.0
    eps = np.finfo(np.float64).eps
    return a.shape[0] * a.shape[1] * eps * float(np.abs(a).max())


def rank_float(matrix, tol: float | None = None) -> int:
    """Numerical rank by elimination with complete pivoting.

    Entries below ``tol`` (default :func:`float_tolerance`) count as zero.
    This is a convenience for floating-point data; the exact GF(p) path is
    the reference.
    """
    a = np.array(matrix, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if a.size == 0:
        return 0
    if tol is None:
        tol = float_tolerance(a)
    m, n = a.shape
    r = 0
    while r < min(m, n):
        sub = np.abs(a[r:, r:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= tol:
            break
        i += r
        j += r
        a[[r, i]] = a[[i, r]]
        a[:, [r, j]] = a[:, [j, r]]
        factors = a[r + 1 :, r] / a[r, r]
        a[r + 1 :, r:] -= np.outer(factors, a[r, r:])
        r += 1
    return r
