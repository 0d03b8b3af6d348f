"""Short symmetric MES candidates for hypercubic systems ``(d, ..., d)``.

The state puts a coefficient 1 on a chosen corner of the hypercube and on
every lattice point of each diagonal through that corner: for every set
``sigma`` of at least two slots and every level ``l = 2..d``, the index with
``l`` in the slots of ``sigma`` and the corner value elsewhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ._validation import PRIME, check_index
from .tensor import State


@dataclass(frozen=True)
class SymmetricSpec:
    """Parameters of a symmetric construction; ``corner`` is 1-based."""

    n: int
    d: int
    corner: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"symmetric construction needs n >= 3, got {self.n}")
        if self.d < 2:
            raise ValueError(f"symmetric construction needs d >= 2, got {self.d}")
        corner = (1,) * self.n if self.corner is None else tuple(int(c) for c in self.corner)
        check_index(corner, (self.d,) * self.n)
        object.__setattr__(self, "corner", corner)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.d,) * self.n

    def positions(self) -> list[tuple[int, ...]]:
        """Support in the all-ones frame, then relabelled onto ``corner``."""
        base = [(1,) * self.n]
        for k in range(2, self.n + 1):
            for sigma in itertools.combinations(range(self.n), k):
                for level in range(2, self.d + 1):
                    base.append(tuple(level if i in sigma else 1 for i in range(self.n)))
        return [self._relabel(p) for p in base]

    def _relabel(self, index) -> tuple[int, ...]:
        # swap the values 1 and corner[i] in slot i
        out = []
        for j, c in zip(index, self.corner):
            out.append(c if j == 1 else 1 if j == c else j)
        return tuple(out)

    def state(self, prime: int = PRIME) -> State:
        return State(self.dims, {p: 1 for p in self.positions()}, "fp", prime)


def symmetric_length(n: int, d: int) -> int:
    """Number of points in the construction: ``1 + (2^n - n - 1)(d - 1)``."""
    if n < 2 or d < 1:
        raise ValueError(f"need n >= 2 and d >= 1, got n={n}, d={d}")
    return 1 + (2**n - n - 1) * (d - 1)


def sn_symmetric_state(n: int, d: int, corner=None, prime: int = PRIME) -> State:
    """Permutation-symmetric state on ``n`` qudits of dimension ``d``, all coefficients 1."""
    return SymmetricSpec(n, d, corner).state(prime)


def s3_symmetric_state(d: int, corner=None, prime: int = PRIME) -> State:
    """Tripartite case: the diagonal plus ``(1,l,l), (l,1,l), (l,l,1)`` for ``l >= 2``.

    Has ``4d - 3`` terms.
    """
    return sn_symmetric_state(3, d, corner, prime)


def s3_principal(d: int) -> int:
    """Principal invariant of the tripartite symmetric state, ``max(0, d^3 - 3d^2 + 2)``."""
    return max(0, d**3 - 3 * d**2 + 2)
