"""Closed-form conjectures for the principal invariant and shortest lengths.

These are oracles for the engine, never substitutes: tables built with
``source="engine"`` always report computed values.
"""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field

from ._validation import PRIME, check_dims
from .invariants import principal_invariant
from .tensor import Support, random_state


def conjectured_principal(dims) -> int:
    """Conjectured principal invariant of the maximally entangled class.

    Tripartite systems with a dimension 2 follow a separate rule: the value
    is ``max(0, a - 3)`` when the other two dimensions are both ``a`` and 0
    otherwise.  Everything else uses
    ``max(0, prod(d) - sum(d^2) + n - 1)``.
    """
    dims = check_dims(dims)
    n = len(dims)
    if n < 3:
        raise ValueError(f"the conjectured formula needs n >= 3, got n={n}")
    if n == 3 and min(dims) == 2:
        rest = sorted(dims)[1:]
        return max(0, rest[0] - 3) if rest[0] == rest[1] else 0
    return max(0, math.prod(dims) - sum(d * d for d in dims) + n - 1)


def conjectured_min_length(dims) -> int:
    """Conjectured shortest MES length for tripartite systems."""
    dims = check_dims(dims)
    if len(dims) != 3:
        raise ValueError("a shortest-length formula is only available for n = 3")
    d1, d2, d3 = sorted(dims)
    if d1 == 2:
        return 2 * d2 - 2 if d2 == d3 else 2 * d2
    if d1 >= 3:
        return d1 + d2 + d3 - 2
    raise ValueError(f"no shortest-length formula for {dims}")


@dataclass(frozen=True)
class MaxLocation:
    """Maximiser(s) of the principal invariant along one axis and the peak value."""

    argmax: tuple[int, ...]
    value: int


def max_location(dims, i: int) -> MaxLocation:
    """Peak of the conjectured principal invariant as party ``i`` (1-based) varies.

    ``dims[i-1]`` is ignored.  With ``P`` the product and ``S`` the sum of
    squares of the other dimensions, the peak sits at ``P/2`` (value
    ``P^2/4 - S + n - 1``) or, for odd ``P``, at ``(P -+ 1)/2`` (value
    ``(P^2 - 1)/4 - S + n - 1``).
    """
    dims = list(dims)
    n = len(dims)
    if not 1 <= i <= n:
        raise ValueError(f"party {i} out of range 1..{n}")
    others = check_dims([d for k, d in enumerate(dims) if k != i - 1], min_parties=1)
    p = math.prod(others)
    s = sum(d * d for d in others)
    if p % 2 == 0:
        return MaxLocation((p // 2,), p * p // 4 - s + n - 1)
    return MaxLocation(((p - 1) // 2, (p + 1) // 2), (p * p - 1) // 4 - s + n - 1)


def generic_principal(dims, seed=0, prime: int = PRIME) -> int:
    """Principal invariant of one generic full-support state."""
    return principal_invariant(random_state(Support.full(dims), seed, prime))


@dataclass
class FormulaTable:
    """Principal-invariant values over a grid of dimension vectors.

    ``template`` holds the fixed dimensions with ``None`` in the varying
    slots; ``axes`` lists the varying slots (0-based) and ``ranges`` their
    values.
    """

    template: tuple
    axes: tuple[int, ...]
    ranges: tuple[tuple[int, ...], ...]
    values: dict[tuple[int, ...], int] = field(default_factory=dict)
    source: str = "formula"

    def dims_at(self, *coords) -> tuple[int, ...]:
        out = list(self.template)
        for axis, c in zip(self.axes, coords):
            out[axis] = c
        return tuple(out)

    def cells(self):
        for coords in itertools.product(*self.ranges):
            yield coords, self.dims_at(*coords)

    def __getitem__(self, coords) -> int:
        if not isinstance(coords, tuple):
            coords = (coords,)
        return self.values[self.dims_at(*coords)]

    def compare(self, other: "FormulaTable") -> list[tuple[tuple[int, ...], int, int]]:
        """Cells present in both tables whose values differ."""
        return [(k, v, other.values[k]) for k, v in self.values.items() if k in other.values and other.values[k] != v]

    def to_csv(self) -> str:
        """Grid layout: rows follow the first varying slot, columns the second."""
        buf = io.StringIO()
        names = [f"d{a + 1}" for a in self.axes]
        if len(self.axes) == 1:
            buf.write(f"{names[0]},N\n")
            for (c,), dims in self.cells():
                buf.write(f"{c},{self.values[dims]}\n")
        elif len(self.axes) == 2:
            rows, cols = self.ranges
            buf.write(f"{names[0]}/{names[1]}," + ",".join(map(str, cols)) + "\n")
            for r in rows:
                buf.write(f"{r}," + ",".join(str(self.values[self.dims_at(r, c)]) for c in cols) + "\n")
        else:
            raise ValueError("CSV layout supports one or two varying slots")
        return buf.getvalue()


def principal_table(template, ranges, source: str = "formula", seed=0, cells=None) -> FormulaTable:
    """Fill a :class:`FormulaTable` from the conjecture or from the engine.

    ``cells`` optionally restricts the engine to a subset of coordinates.
    """
    template = tuple(template)
    axes = tuple(k for k, d in enumerate(template) if d is None)
    if len(axes) != len(ranges):
        raise ValueError("need one range per varying slot")
    table = FormulaTable(template, axes, tuple(tuple(r) for r in ranges), {}, source)
    wanted = None if cells is None else {tuple(c) if isinstance(c, tuple) else (c,) for c in cells}
    for coords, dims in table.cells():
        if wanted is not None and coords not in wanted:
            continue
        if source == "formula":
            table.values[dims] = conjectured_principal(dims)
        elif source == "engine":
            table.values[dims] = generic_principal(dims, seed)
        else:
            raise ValueError(f"unknown source {source!r}")
    return table


def recurrence_check(values, i) -> list[dict]:
    """Check the finite-difference identities of the principal invariant.

    ``values`` maps dimension tuples to invariants (a :class:`FormulaTable`
    or a plain dict).  ``i`` is a 0-based slot or a tuple of ``k`` slots; the
    identity is that the sum over the ``2^k`` neighbours ``d +- 1`` in those
    slots equals ``2^k N(d) - 2^k k``.  Only centres whose neighbours are all
    present and positive are tested.
    """
    if isinstance(values, FormulaTable):
        values = values.values
    axes = (i,) if isinstance(i, int) else tuple(i)
    k = len(axes)
    violations = []
    for centre, value in values.items():
        if value <= 0:
            continue
        nbrs = []
        for signs in itertools.product((-1, 1), repeat=k):
            d = list(centre)
            for axis, s in zip(axes, signs):
                d[axis] += s
            nbrs.append(values.get(tuple(d)))
        if any(v is None or v <= 0 for v in nbrs):
            continue
        expected = 2**k * value - 2**k * k
        if sum(nbrs) != expected:
            violations.append({"centre": centre, "axes": axes, "neighbour_sum": sum(nbrs), "expected": expected})
    return violations


def polynomial_rows(d1: int = 3, d2_range=range(3, 17)) -> list[dict]:
    """Quadratic in ``d3`` for each ``d2`` and the ``d3`` range where it is positive.

    ``N = -d3^2 + b d3 - c`` with ``b = d1 d2`` and
    ``c = d1^2 + d2^2 - 2``; ``d3`` starts at 3 so the tripartite
    dimension-2 rule never applies.
    """
    rows = []
    for d2 in d2_range:
        b = d1 * d2
        c = d1 * d1 + d2 * d2 - 2
        positive = [d3 for d3 in range(3, b + 1) if -d3 * d3 + b * d3 - c > 0]
        rows.append({"d2": d2, "b": b, "c": c, "d3_min": min(positive), "d3_max": max(positive)})
    return rows
