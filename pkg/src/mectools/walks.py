"""Random walks through entanglement classes.

A forward (heating) walk starts at the vacuum and switches on one absent
coefficient per step with a fresh generic value; a reverse (cooling) walk
switches present coefficients off one at a time.  Each walk ``k`` of an
ensemble is driven by its own generator seeded from ``(seed, k)``, so
ensembles split into ranges merge to exactly the same counts.

Generic ranks can only drop when coefficients are added, so every invariant
is non-increasing along a forward walk and the maximally entangled class is
absorbing.  Forward walks therefore stop computing after the first arrival
and simply extend the trace (pass ``verify=True`` to recompute anyway).
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import PRIME, check_dims
from .antichains import enumerate_family
from .constructions import SymmetricSpec
from .invariants import dense_invariants
from .registry import ClassRegistry, derive_seed, mec_signature
from .tensor import State, Support, offset, random_values

HEAT_THRESHOLD = 4


@dataclass
class WalkTrace:
    """Invariant vector after each step of one walk (step 0 is the start)."""

    dims: tuple[int, ...]
    seed: int
    vectors: list[tuple[int, ...]]
    sizes: list[int]
    first_mec_step: int | None
    final_support: Support
    direction: str = "forward"

    def labels(self, registry: ClassRegistry) -> list[int]:
        lab = registry.labels()
        return [lab[v] for v in self.vectors]

    def steps(self, registry: ClassRegistry) -> list[tuple[int, int]]:
        return list(enumerate(self.labels(registry)))

    def to_csv(self, registry: ClassRegistry) -> str:
        lines = ["step,class_label,support_size"]
        lines += [f"{k},{c},{s}" for k, (c, s) in enumerate(zip(self.labels(registry), self.sizes))]
        return "\n".join(lines) + "\n"


class _Classifier:
    """Invariant vectors of dense GF(p) tensors for one ``dims``."""

    def __init__(self, dims, prime=PRIME):
        self.dims = dims
        self.prime = prime
        self.family = enumerate_family(len(dims))
        self.mec = mec_signature(dims, prime=prime).vector

    def __call__(self, flat: np.ndarray) -> tuple[int, ...]:
        return dense_invariants(flat.reshape(self.dims), self.family, self.prime)


def _forward(dims, seed, classifier, stop_at_mec=False, verify=False):
    total = math.prod(dims)
    rng = np.random.default_rng(seed)
    order = rng.permutation(total)
    values = random_values(rng, total, classifier.prime)
    flat = np.zeros(total, dtype=np.int64)
    vectors = [classifier(flat)]
    first = 0 if vectors[0] == classifier.mec else None
    for step in range(1, total + 1):
        flat[order[step - 1]] = values[step - 1]
        if first is None or verify:
            vec = classifier(flat)
        else:
            vec = classifier.mec
        vectors.append(vec)
        if first is None and vec == classifier.mec:
            first = step
            if stop_at_mec:
                break
    return vectors, order[: len(vectors) - 1], values[: len(vectors) - 1], first


def forward_walk(dims, seed=0, stop_at_mec=False, verify=False, prime: int = PRIME) -> WalkTrace:
    """Heat from the vacuum to full support, classifying after each step."""
    dims = check_dims(dims)
    clf = _Classifier(dims, prime)
    vectors, order, _, first = _forward(dims, seed, clf, stop_at_mec, verify)
    support = Support.from_offsets(dims, order.tolist())
    return WalkTrace(dims, seed, vectors, list(range(len(vectors))), first, support, "forward")


def _reverse(dims, flat, seed, classifier):
    rng = np.random.default_rng(seed)
    order = rng.permutation(np.flatnonzero(flat))
    flat = flat.copy()
    vectors = [classifier(flat)]
    for k in order:
        flat[k] = 0
        vectors.append(classifier(flat))
    return vectors, order


def reverse_walk(start, seed=0, prime: int = PRIME) -> WalkTrace:
    """Cool a state (or a support with generic values) down to the vacuum.

    Surviving coefficients keep their values; one uniformly chosen present
    coefficient is removed per step.
    """
    if isinstance(start, Support):
        if start.length == 0:
            raise ValueError("reverse walk needs a nonempty start")
        offs = start.offsets()
        flat = np.zeros(math.prod(start.dims), dtype=np.int64)
        flat[offs] = random_values(np.random.default_rng(derive_seed(seed, 1)), len(offs), prime)
        dims = start.dims
    elif isinstance(start, State):
        if start.length == 0:
            raise ValueError("reverse walk needs a nonempty start")
        if start.backend != "fp":
            raise ValueError("walks run on the prime-field backend")
        dims, prime = start.dims, start.prime
        flat = start.to_dense().reshape(-1)
    else:
        raise TypeError("start must be a Support or a State")
    clf = _Classifier(dims, prime)
    vectors, _ = _reverse(dims, flat, seed, clf)
    first = next((k for k, v in enumerate(vectors) if v == clf.mec), None)
    n0 = int(np.count_nonzero(flat))
    return WalkTrace(dims, seed, vectors, [n0 - k for k in range(len(vectors))], first, Support.empty(dims), "reverse")


@dataclass
class TransitionCounts:
    """Class-to-class step counts; ``counts[i, j]`` counts steps ``C_j -> C_i``."""

    dims: tuple[int, ...]
    labels: list[tuple[int, ...]]
    counts: np.ndarray
    ensemble_size: int

    @property
    def absorbing(self) -> int:
        return len(self.labels) - 1


@dataclass
class HeatMap:
    """Hits per (class, step) with per-step mean class label."""

    dims: tuple[int, ...]
    matrix: np.ndarray
    threshold: int = HEAT_THRESHOLD

    def masked(self) -> np.ndarray:
        """Counts below the threshold set to zero."""
        return np.where(self.matrix >= self.threshold, self.matrix, 0)

    def mean_class(self) -> np.ndarray:
        hits = self.matrix.sum(axis=0)
        labels = np.arange(self.matrix.shape[0])[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(hits > 0, (labels * self.matrix).sum(axis=0) / np.maximum(hits, 1), np.nan)

    def to_csv(self) -> str:
        lines = ["class,step,count"]
        m = self.masked()
        for c, s in zip(*np.nonzero(m)):
            lines.append(f"{c},{s},{m[c, s]}")
        return "\n".join(lines) + "\n"


@dataclass
class EnsembleResult:
    """Merged statistics of walks ``start .. start + count - 1``.

    Counters are keyed by invariant vectors; canonical class labels come
    from :attr:`registry`.  Forward statistics cover each walk up to and
    including its first arrival in the maximally entangled class.
    """

    dims: tuple[int, ...]
    seed: int
    count: int
    mode: str = "forward"
    visits: Counter = field(default_factory=Counter)
    transitions: Counter = field(default_factory=Counter)
    heat: Counter = field(default_factory=Counter)
    reverse_heat: Counter = field(default_factory=Counter)
    first_steps: Counter = field(default_factory=Counter)
    examples: dict = field(default_factory=dict)
    walks: range = range(0)
    registry: ClassRegistry | None = None

    # -- merging -------------------------------------------------------
    def merge(self, other: "EnsembleResult") -> "EnsembleResult":
        if (self.dims, self.seed, self.mode) != (other.dims, other.seed, other.mode):
            raise ValueError("can only merge ensembles with equal dims, seed and mode")
        out = EnsembleResult(self.dims, self.seed, self.count + other.count, self.mode)
        for name in ("visits", "transitions", "heat", "reverse_heat", "first_steps"):
            getattr(out, name).update(getattr(self, name))
            getattr(out, name).update(getattr(other, name))
        out.examples = dict(self.examples)
        for vec, supp in other.examples.items():
            if vec not in out.examples or supp.sort_key() < out.examples[vec].sort_key():
                out.examples[vec] = supp
        out.walks = range(min(self.walks.start, other.walks.start), max(self.walks.stop, other.walks.stop))
        out.build_registry()
        return out

    def build_registry(self) -> ClassRegistry:
        """File every observed vector (new ones double-checked with a second prime)."""
        reg = ClassRegistry(self.dims)
        reg.mec_signature = mec_signature(self.dims)
        remap = {}
        vectors = set(self.visits) | {v for v, _ in self.reverse_heat}
        for vec in sorted(vectors, key=lambda v: (-sum(v), v)):
            supp = self.examples.get(vec)
            rec = reg.observe(vec, supp, count=self.visits.get(vec, 0), seed=derive_seed(self.seed, 7, sum(vec)))
            remap[vec] = rec.vector
        if any(a != b for a, b in remap.items()):
            self._remap(remap)
        self.registry = reg.canonicalize()
        return self.registry

    def _remap(self, remap):
        self.visits = Counter({remap[v]: c for v, c in self.visits.items()})
        self.transitions = Counter({(remap[a], remap[b]): c for (a, b), c in self.transitions.items()})
        self.heat = Counter({(remap[v], s): c for (v, s), c in self.heat.items()})
        self.reverse_heat = Counter({(remap[v], s): c for (v, s), c in self.reverse_heat.items()})

    # -- views -----------------------------------------------------------
    @property
    def mec_vector(self) -> tuple[int, ...]:
        return mec_signature(self.dims).vector

    def label_of(self) -> dict:
        return self.registry.labels()

    def visit_counts(self) -> list[tuple[int, tuple[int, ...], int]]:
        lab = self.label_of()
        return sorted((lab[v], v, c) for v, c in self.visits.items())

    def transition_counts(self) -> TransitionCounts:
        """Counts over the visited classes, the MEC moved to the last index."""
        mec = self.mec_vector
        order = [r.vector for r in self.registry.canonical_records() if r.vector in self.visits and r.vector != mec]
        order.append(mec)
        index = {v: k for k, v in enumerate(order)}
        mat = np.zeros((len(order), len(order)), dtype=np.int64)
        for (a, b), c in self.transitions.items():
            mat[index[b], index[a]] += c
        return TransitionCounts(self.dims, order, mat, self.count)

    def heat_map(self, threshold: int = HEAT_THRESHOLD, reverse: bool = False) -> HeatMap:
        source = self.reverse_heat if reverse else self.heat
        lab = self.label_of()
        steps = max((s for _, s in source), default=0) + 1
        mat = np.zeros((len(self.registry), steps), dtype=np.int64)
        for (v, s), c in source.items():
            mat[lab[v], s] += c
        return HeatMap(self.dims, mat, threshold)

    def histogram(self) -> list[tuple[int, int]]:
        return sorted(self.first_steps.items())

    def histogram_csv(self) -> str:
        return "steps,count\n" + "".join(f"{s},{c}\n" for s, c in self.histogram())

    def mean_first_step(self) -> float:
        n = sum(self.first_steps.values())
        return sum(s * c for s, c in self.first_steps.items()) / n

    def std_error(self) -> float:
        n = sum(self.first_steps.values())
        mean = self.mean_first_step()
        var = sum(c * (s - mean) ** 2 for s, c in self.first_steps.items()) / max(n - 1, 1)
        return math.sqrt(var / n)

    def mode_first_step(self) -> int:
        return max(self.first_steps.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def _run_chunk(args) -> EnsembleResult:
    dims, seed, start, stop, mode, prime = args
    clf = _Classifier(dims, prime)
    res = EnsembleResult(dims, seed, stop - start, mode, walks=range(start, stop))
    for k in range(start, stop):
        vectors, order, values, first = _forward(dims, derive_seed(seed, k), clf, stop_at_mec=True)
        path = vectors[: first + 1]
        res.first_steps[first] += 1
        for step, vec in enumerate(path):
            res.visits[vec] += 1
            res.heat[(vec, step)] += 1
            if vec not in res.examples or step < res.examples[vec].length:
                res.examples[vec] = Support.from_offsets(dims, order[:step].tolist())
        for a, b in zip(path, path[1:]):
            res.transitions[(a, b)] += 1
        if mode == "reverse":
            flat = np.zeros(math.prod(dims), dtype=np.int64)
            flat[order[:first]] = values[:first]
            back, removed = _reverse(dims, flat, derive_seed(seed, k, 1), clf)
            for step, vec in enumerate(back):
                res.reverse_heat[(vec, step)] += 1
                if vec not in res.examples:
                    res.examples[vec] = Support.from_offsets(dims, removed[step:].tolist())
    return res


def _chunks(start, count, pieces):
    bounds = np.linspace(start, start + count, pieces + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]


def run_ensemble(dims, count: int, seed: int = 0, mode: str = "forward", threads: int | None = None, start: int = 0, prime: int = PRIME) -> EnsembleResult:
    """Run walks ``start .. start + count - 1`` and merge their statistics.

    ``mode="reverse"`` additionally cools each walk from its first MEC
    state back to the vacuum.  Results do not depend on ``threads``.
    """
    dims = check_dims(dims)
    if count < 1:
        raise ValueError("count must be >= 1")
    if mode not in ("forward", "reverse"):
        raise ValueError(f"unknown mode {mode!r}")
    threads = threads or os.cpu_count() or 1
    pieces = min(threads, count)
    tasks = [(dims, seed, a, b, mode, prime) for a, b in _chunks(start, count, pieces)]
    if pieces == 1:
        parts = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=pieces) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    result = parts[0]
    for part in parts[1:]:
        result = result.merge(part)
    if result.registry is None:
        result.build_registry()
    return result


def mec_fraction(dims, count: int = 1000, seed: int = 0, threads: int | None = None) -> float:
    """Mean support size at first MEC arrival divided by the total dimension."""
    res = run_ensemble(dims, count, seed, threads=threads)
    return res.mean_first_step() / math.prod(check_dims(dims))


def fraction_grid(d1: int, sizes=range(1, 7), count: int = 1000, seed: int = 0, threads: int | None = None) -> np.ndarray:
    """:func:`mec_fraction` over ``(d1, d2, d3)`` for ``d2, d3`` in ``sizes``."""
    sizes = list(sizes)
    grid = np.zeros((len(sizes), len(sizes)))
    for a, d2 in enumerate(sizes):
        for b, d3 in enumerate(sizes):
            if b < a:
                grid[a, b] = grid[b, a]  # permutation symmetry of the class structure
                continue
            grid[a, b] = mec_fraction((d1, d2, d3), count, derive_seed(seed, d1, d2, d3), threads)
    return grid


@dataclass(frozen=True)
class SymmetricPathResult:
    """Steps to the MEC when switching on a symmetric state's terms in order."""

    n: int
    d: int
    default_steps: int | None
    samples: Counter

    @property
    def minimum(self) -> int | None:
        return min(self.samples) if self.samples else self.default_steps

    @property
    def mean(self) -> float | None:
        total = sum(self.samples.values())
        return sum(k * c for k, c in self.samples.items()) / total if total else None


def default_symmetric_order(spec: SymmetricSpec) -> list[tuple[int, ...]]:
    """Diagonal terms ``l = 1..d`` first, then the off-diagonal terms level by level.

    Only defined for the all-ones corner.
    """
    if spec.corner != (1,) * spec.n:
        raise ValueError("the default ordering assumes the all-ones corner")
    positions = spec.positions()
    diagonal = sorted(p for p in positions if len(set(p)) == 1)
    rest = sorted((p for p in positions if len(set(p)) > 1), key=lambda p: (max(p), p))
    return diagonal + rest


def _steps_for_order(dims, order, classifier) -> int | None:
    flat = np.zeros(math.prod(dims), dtype=np.int64)
    for step, pos in enumerate(order, start=1):
        flat[offset(pos, dims)] = 1
        if classifier(flat) == classifier.mec:
            return step
    return None


def symmetric_path_steps(n: int, d: int, ordering="default", seed: int = 0, samples: int = 0) -> SymmetricPathResult:
    """First MEC arrival while switching on the symmetric state's coefficients.

    ``ordering`` is ``"default"`` or an explicit list of positions; ``samples``
    extra uniformly random orderings give the distribution.
    """
    spec = SymmetricSpec(n, d)
    clf = _Classifier(spec.dims)
    if ordering == "default":
        order = default_symmetric_order(spec)
    else:
        order = [tuple(p) for p in ordering]
        if sorted(order) != sorted(spec.positions()):
            raise ValueError("ordering must permute the symmetric state's support")
    default = _steps_for_order(spec.dims, order, clf)
    rng = np.random.default_rng(seed)
    positions = spec.positions()
    dist: Counter = Counter()
    for _ in range(samples):
        perm = rng.permutation(len(positions))
        dist[_steps_for_order(spec.dims, [positions[k] for k in perm], clf)] += 1
    return SymmetricPathResult(n, d, default, dist)


def exhaustive_min_symmetric_steps(n: int, d: int, max_length: int = 2) -> int | None:
    """Shortest sub-support (up to ``max_length``) of the symmetric state that is an MES."""
    spec = SymmetricSpec(n, d)
    clf = _Classifier(spec.dims)
    positions = spec.positions()
    for length in range(1, max_length + 1):
        for combo in itertools.combinations(positions, length):
            flat = np.zeros(math.prod(spec.dims), dtype=np.int64)
            for p in combo:
                flat[offset(p, spec.dims)] = 1
            if clf(flat) == clf.mec:
                return length
    return None


__all__ = [
    "WalkTrace",
    "TransitionCounts",
    "HeatMap",
    "EnsembleResult",
    "forward_walk",
    "reverse_walk",
    "run_ensemble",
    "mec_fraction",
    "fraction_grid",
    "SymmetricPathResult",
    "symmetric_path_steps",
    "default_symmetric_order",
    "exhaustive_min_symmetric_steps",
]
