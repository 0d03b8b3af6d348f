"""Absorbing Markov chain analysis of class-to-class transition data.

Matrices are column-stochastic: ``P[i, j]`` is the probability of moving
from class ``j`` to class ``i`` and every column sums to one.  The absorbing
class is the last index.  Treating the empirical class process as a Markov
chain is an approximation (transition probabilities within a class also
depend on the current support size).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

COLUMN_TOL = 1e-9
RESIDUAL_TOL = 1e-8
MAX_SQUARINGS = 64


class NotAbsorbingError(ValueError):
    """The chain does not drain into a single absorbing class."""


class ConvergenceError(RuntimeError):
    """Repeated squaring did not settle."""


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic transition matrix with the absorbing class last."""

    P: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {P.shape}")
        if np.any(P < -COLUMN_TOL) or np.any(P > 1 + COLUMN_TOL):
            raise ValueError("probabilities must lie in [0, 1]")
        sums = P.sum(axis=0)
        if np.any(np.abs(sums - 1) > COLUMN_TOL):
            raise ValueError(f"columns must sum to 1, got {np.round(sums, 12).tolist()}")
        object.__setattr__(self, "P", P)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(P.shape[0])))

    @property
    def size(self) -> int:
        return self.P.shape[0]

    @property
    def absorbing(self) -> int:
        return self.size - 1

    @property
    def transient(self) -> np.ndarray:
        """Block ``P~`` of transitions among transient classes."""
        m = self.absorbing
        return self.P[:m, :m]

    @classmethod
    def normalized(cls, matrix, labels=()) -> "StochasticMatrix":
        """Rescale columns to sum to one (for rounded published matrices)."""
        M = np.array(matrix, dtype=float)
        return cls(M / M.sum(axis=0, keepdims=True), labels)

    def to_csv(self, digits: int = 6) -> str:
        buf = io.StringIO()
        buf.write("# convention: column-stochastic (entry i,j is the probability of class j -> class i)\n")
        buf.write("to\\from," + ",".join(map(str, self.labels)) + "\n")
        for i, lab in enumerate(self.labels):
            buf.write(f"{lab}," + ",".join(f"{x:.{digits}f}" for x in self.P[i]) + "\n")
        return buf.getvalue()

    def to_dot(self, prefix: str = "C") -> str:
        """Traffic digraph with edge labels rounded to two decimals."""
        lines = ["digraph traffic {", "  rankdir=LR;"]
        for lab in self.labels:
            lines.append(f'  "{prefix}{lab}";')
        for j, src in enumerate(self.labels):
            for i, dst in enumerate(self.labels):
                p = self.P[i, j]
                if p > 0 and not (i == j == self.absorbing):
                    lines.append(f'  "{prefix}{src}" -> "{prefix}{dst}" [label="{p:.2f}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def from_counts(counts) -> StochasticMatrix:
    """Column-normalise a transition count matrix; the absorbing column becomes a unit vector.

    ``counts`` is a :class:`~mectools.walks.TransitionCounts` or a square array
    in the same ``[to, from]`` layout.
    """
    labels = ()
    if hasattr(counts, "counts"):
        labels = tuple(range(len(counts.labels)))
        counts = counts.counts
    C = np.array(counts, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"expected a square count matrix, got shape {C.shape}")
    m = C.shape[0] - 1
    out = np.zeros_like(C)
    for j in range(m):
        total = C[:, j].sum()
        if total == 0:
            raise NotAbsorbingError(f"class {j} has no outgoing transitions")
        out[:, j] = C[:, j] / total
    out[m, m] = 1.0
    return StochasticMatrix(out, labels)


def validate_absorbing(P) -> bool:
    """True iff the last class is the unique absorbing class and is reachable from all others.

    Also checks that the first five powers stay column-stochastic.
    """
    P = P.P if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)
    size = P.shape[0]
    m = size - 1
    if size < 1 or abs(P[m, m] - 1) > COLUMN_TOL:
        return False
    # reverse reachability from the absorbing class along edges j -> i with P[i, j] > 0
    edges = P > 0
    reached = {m}
    frontier = [m]
    for _ in range(size + 1):
        nxt = []
        for i in frontier:
            for j in np.flatnonzero(edges[i]):
                if j not in reached:
                    reached.add(int(j))
                    nxt.append(int(j))
        frontier = nxt
    if len(reached) != size:
        return False
    power = np.eye(size)
    for _ in range(5):
        power = P @ power
        if np.any(np.abs(power.sum(axis=0) - 1) > 1e-9):
            return False
    return True


def _require_absorbing(P) -> StochasticMatrix:
    if not isinstance(P, StochasticMatrix):
        P = StochasticMatrix(P)
    if not validate_absorbing(P):
        raise NotAbsorbingError("matrix is not an absorbing chain with the last class absorbing")
    return P


def fundamental_matrix(P) -> np.ndarray:
    """``(I - P~)^{-1}`` by an LU solve, checked by its residual."""
    P = _require_absorbing(P)
    T = P.transient
    A = np.eye(T.shape[0]) - T
    try:
        F = np.linalg.solve(A, np.eye(T.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise NotAbsorbingError("I - P~ is singular") from exc
    residual = np.abs(A @ F - np.eye(T.shape[0])).max(initial=0.0)
    if residual > RESIDUAL_TOL:
        raise NotAbsorbingError(f"solve residual {residual:.2e} exceeds {RESIDUAL_TOL}")
    return F


def expected_steps(P) -> np.ndarray:
    """Expected steps to absorption from each class (0 for the absorbing one)."""
    F = fundamental_matrix(P)
    return np.append(F.sum(axis=0), 0.0)


def expected_steps_series(P, mass_tol: float = 1e-10, max_terms: int = 100_000) -> np.ndarray:
    """Same quantity as :func:`expected_steps` from the absorption-time series.

    Sums ``k (P^k - P^{k-1})`` on the absorbing row until the remaining
    transient mass drops below ``mass_tol``.
    """
    P = _require_absorbing(P)
    M = P.P
    m = P.absorbing
    prev = np.eye(P.size)
    q = np.zeros(P.size)
    for k in range(1, max_terms + 1):
        cur = M @ prev
        q += k * (cur[m] - prev[m])
        prev = cur
        if 1 - cur[m].min() < mass_tol:
            return q
    raise ConvergenceError("absorption series did not converge")


def limit_matrix(P, tol: float = 1e-12) -> np.ndarray:
    """``lim P^k`` by repeated squaring (at most 64 squarings)."""
    M = P.P if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)
    for _ in range(MAX_SQUARINGS):
        nxt = M @ M
        if np.abs(nxt - M).max() < tol:
            return nxt
        M = nxt
    raise ConvergenceError(f"no convergence within {MAX_SQUARINGS} squarings")


@dataclass(frozen=True)
class ChainAnalysis:
    """Fundamental matrix, expected steps and limit of an absorbing chain."""

    fundamental: np.ndarray
    expected: np.ndarray
    limit: np.ndarray


def analyze(P) -> ChainAnalysis:
    P = _require_absorbing(P)
    return ChainAnalysis(fundamental_matrix(P), expected_steps(P), limit_matrix(P))
