"""Maximal intersecting antichains of proper subsets of {1..n}.

Each antichain indexes one invariant: its member sets are the index groups
that get contracted between ``v`` and ``w``.  Subsets are stored as bit
masks, bit ``i-1`` standing for party ``i``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

MAX_N = 5
LONG_MAX_N = 6

Antichain = tuple[int, ...]


def mask_to_set(mask: int) -> tuple[int, ...]:
    """1-based members of a bit mask."""
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def set_to_mask(members) -> int:
    mask = 0
    for i in members:
        if i < 1:
            raise ValueError(f"party labels are 1-based, got {i}")
        mask |= 1 << (i - 1)
    return mask


def proper_subsets(n: int) -> list[int]:
    """Nonempty proper subsets of {1..n} in lexicographic order of their members."""
    full = (1 << n) - 1
    return sorted(range(1, full), key=mask_to_set)


def compatible(a: int, b: int) -> bool:
    """True if ``a`` and ``b`` intersect and neither contains the other."""
    c = a & b
    return c != 0 and c != a and c != b


def is_maximal_intersecting_antichain(sets, n: int) -> bool:
    """Independent checker: pairwise compatibility plus maximality by exhaustion."""
    sets = list(sets)
    full = (1 << n) - 1
    if not sets or len(set(sets)) != len(sets):
        return False
    if any(not 0 < s < full for s in sets):
        return False
    if len(sets) > 1 and not all(compatible(a, b) for a, b in itertools.combinations(sets, 2)):
        return False
    for cand in range(1, full):
        if cand in sets:
            continue
        if all(compatible(cand, s) for s in sets):
            return False
    return True


def principal_antichain(n: int) -> Antichain:
    """``{J_1, ..., J_n}`` with ``J_i`` the complement of ``{i}``, in that order."""
    if n < 2:
        raise ValueError("need n >= 2")
    full = (1 << n) - 1
    return tuple(full ^ (1 << i) for i in range(n))


def _dfs_family(n: int) -> list[Antichain]:
    subs = proper_subsets(n)
    m = len(subs)
    # compat[i]: bitset over candidate positions compatible with subs[i]
    compat = []
    for a in subs:
        bits = 0
        for j, b in enumerate(subs):
            if compatible(a, b):
                bits |= 1 << j
        compat.append(bits)
    out: list[Antichain] = []
    everything = (1 << m) - 1

    def rec(i: int, allowed: int, skipped: int, chosen: list[int]) -> None:
        future = everything & ~((1 << i) - 1)
        # every skipped-but-still-allowed set must be blocked by a later pick
        pending = skipped & allowed
        while pending:
            low = pending & -pending
            s = low.bit_length() - 1
            if not (allowed & future & ~compat[s]):
                return
            pending ^= low
        nxt = allowed & future
        if not nxt:
            if chosen and not allowed:
                out.append(tuple(subs[j] for j in chosen))
            return
        j = (nxt & -nxt).bit_length() - 1
        chosen.append(j)
        rec(j + 1, allowed & compat[j], skipped, chosen)
        chosen.pop()
        rec(j + 1, allowed, skipped | (1 << j), chosen)

    rec(0, everything, 0, [])
    return out


def brute_force_family(n: int) -> list[Antichain]:
    """Filter every set of proper subsets; only usable for n <= 4."""
    if n > 4:
        raise ValueError("brute force is limited to n <= 4")
    subs = proper_subsets(n)
    found = []
    for r in range(1, len(subs) + 1):
        for combo in itertools.combinations(subs, r):
            if is_maximal_intersecting_antichain(combo, n):
                found.append(tuple(combo))
    return found


def canonical_order(antichains, n: int) -> list[Antichain]:
    """Sort by (member count, member sizes, sorted masks), principal last."""
    principal = tuple(sorted(principal_antichain(n)))

    def key(ac):
        masks = tuple(sorted(ac))
        return (len(masks), tuple(sorted(bin(s).count("1") for s in masks)), masks)

    normed = sorted((tuple(sorted(ac)) for ac in antichains), key=key)
    rest = [ac for ac in normed if ac != principal]
    if len(rest) != len(normed):
        rest.append(principal)
    return rest


@dataclass(frozen=True)
class InvariantFamily:
    """Canonically ordered antichains for ``n`` parties."""

    n: int
    antichains: tuple[Antichain, ...]

    @property
    def principal_index(self) -> int:
        return len(self.antichains) - 1

    def __len__(self) -> int:
        return len(self.antichains)

    def __iter__(self):
        return iter(self.antichains)

    def __getitem__(self, k):
        return self.antichains[k]

    def index(self, antichain) -> int:
        return self.antichains.index(tuple(sorted(antichain)))

    def subsets(self) -> list[int]:
        """Distinct member sets over the whole family."""
        return sorted({s for ac in self.antichains for s in ac})

    def to_lists(self) -> list[list[list[int]]]:
        return [[list(mask_to_set(s)) for s in ac] for ac in self.antichains]

    def to_json(self) -> str:
        return json.dumps(self.to_lists(), separators=(",", ":"))

    @property
    def hash(self) -> str:
        """Fingerprint of the ordering, stored with exported invariant vectors."""
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def relabel(self, perm) -> list[int]:
        """Positions of the antichains after permuting tensor factors.

        ``perm[k]`` is the old slot that becomes slot ``k``; the returned list
        maps old family position to new family position.
        """
        inv = {old: new for new, old in enumerate(perm)}

        def move(mask):
            return sum(1 << inv[i] for i in range(self.n) if mask >> i & 1)

        lookup = {ac: k for k, ac in enumerate(self.antichains)}
        return [lookup[tuple(sorted(move(s) for s in ac))] for ac in self.antichains]


@lru_cache(maxsize=None)
def _family_cached(n: int) -> InvariantFamily:
    return InvariantFamily(n, tuple(canonical_order(_dfs_family(n), n)))


def enumerate_family(n: int, allow_long: bool = False) -> InvariantFamily:
    """All maximal intersecting antichains of proper subsets of {1..n}.

    ``n = 6`` (11,747 antichains; the vectors get large) needs
    ``allow_long=True``.
    """
    limit = LONG_MAX_N if allow_long else MAX_N
    if not 2 <= n <= limit:
        hint = " (pass allow_long=True for n = 6)" if n == LONG_MAX_N else ""
        raise ValueError(f"family enumeration supports 2 <= n <= {limit}, got {n}{hint}")
    return _family_cached(n)
