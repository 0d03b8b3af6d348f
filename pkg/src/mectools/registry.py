"""Entanglement class catalogs keyed by invariant vectors.

Classes are discovered from support patterns carrying generic (uniformly
random, nonzero) GF(p) coefficients.  Classes that only occur for special
coefficient relations are invisible to this method, so class counts are
lower bounds.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from ._validation import PRIME, SECOND_PRIME, DimensionError, check_dims
from .antichains import enumerate_family
from .invariants import dense_invariants, dense_matches, invariant_vector
from .tensor import State, Support, random_state, random_values

logger = logging.getLogger(__name__)

FORMAT = "mectools.registry"
FORMAT_VERSION = 1
MAX_REPRESENTATIVES = 8
MAX_EXHAUSTIVE_DIM = 20
MAX_SIGNATURE_ATTEMPTS = 10


class SignatureInstabilityError(RuntimeError):
    """Independent generic draws keep disagreeing on the invariant vector."""


class RegistryFormatError(ValueError):
    """Registry file is malformed, from another version, or for other dims."""


def derive_seed(seed, *keys) -> int:
    """Deterministic child seed for ``(seed, *keys)``; fresh entropy if ``seed`` is None."""
    if seed is None:
        return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    ss = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return int(ss.generate_state(1, np.uint64)[0])


def canonical_key(vector) -> tuple:
    """Export order: larger invariant sums first, then lexicographic."""
    return (-sum(vector), tuple(vector))


def dense_from_offsets(dims, offsets, values) -> np.ndarray:
    flat = np.zeros(math.prod(dims), dtype=np.int64)
    flat[np.asarray(offsets, dtype=np.int64)] = values
    return flat.reshape(dims)


@dataclass
class ClassRecord:
    """One discovered class with a few of its shortest support patterns."""

    label: int
    vector: tuple[int, ...]
    representatives: list[Support] = field(default_factory=list)
    visit_count: int = 0
    min_observed_length: int | None = None

    def add_representative(self, support: Support, limit: int = MAX_REPRESENTATIVES) -> None:
        if self.min_observed_length is None or support.length < self.min_observed_length:
            self.min_observed_length = support.length
        if support in self.representatives:
            return
        if len(self.representatives) >= limit and support.sort_key() >= self.representatives[-1].sort_key():
            return
        self.representatives.append(support)
        self.representatives.sort(key=Support.sort_key)
        del self.representatives[limit:]


@dataclass(frozen=True)
class MecSignature:
    """Invariant vector shared by independent generic full-support draws."""

    vector: tuple[int, ...]
    confirmation_count: int

    @property
    def principal(self) -> int:
        return self.vector[-1]


class ClassRegistry:
    """Map from invariant vectors to :class:`ClassRecord` for one ``dims``.

    Parameters
    ----------
    dims : sequence of int
        Dimension vector of the system.
    prime, second_prime : int
        Working prime and the prime used to double-check every new class.
    family : InvariantFamily, optional
        Defaults to the canonical family for ``len(dims)``.
    """

    def __init__(self, dims, prime: int = PRIME, second_prime: int = SECOND_PRIME, family=None):
        self.dims = check_dims(dims)
        self.prime = prime
        self.second_prime = second_prime
        self.family = family if family is not None else enumerate_family(len(self.dims))
        self.records: dict[tuple[int, ...], ClassRecord] = {}
        self.mec_signature: MecSignature | None = None
        self.disagreements: list[dict] = []

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, vector) -> bool:
        return tuple(vector) in self.records

    def __getitem__(self, vector) -> ClassRecord:
        return self.records[tuple(vector)]

    # -- computing vectors --------------------------------------------------
    def _vector_for(self, support: Support, seed, prime: int) -> tuple[int, ...]:
        offs = support.offsets()
        rng = np.random.default_rng(seed)
        dense = dense_from_offsets(self.dims, offs, random_values(rng, len(offs), prime))
        return dense_invariants(dense, self.family, prime)

    def confirm(self, vector, support: Support, seed=None) -> tuple[int, ...]:
        """Recompute ``support`` modulo the second prime and reconcile.

        Kernel dimensions can only grow on special coefficient values, so on a
        disagreement a third draw is taken and the componentwise minimum kept.
        """
        vector = tuple(vector)
        other = self._vector_for(support, derive_seed(seed, 1), self.second_prime)
        if other == vector:
            return vector
        third = self._vector_for(support, derive_seed(seed, 2), self.prime)
        resolved = tuple(min(a, b, c) for a, b, c in zip(vector, other, third))
        self.disagreements.append(
            {"support": support.to_list(), "first": list(vector), "second": list(other), "resolved": list(resolved)}
        )
        logger.warning("generic vectors disagree on %s: %s vs %s", support.to_list(), vector, other)
        return resolved

    def observe(self, vector, support: Support | None = None, count: int = 1, seed=None, confirm=True) -> ClassRecord:
        """Insert-or-update the record for ``vector``; new vectors are confirmed first."""
        vector = tuple(int(x) for x in vector)
        if vector not in self.records and confirm and support is not None:
            vector = self.confirm(vector, support, seed)
        rec = self.records.get(vector)
        if rec is None:
            rec = ClassRecord(len(self.records), vector)
            self.records[vector] = rec
        rec.visit_count += count
        if support is not None:
            rec.add_representative(support)
        return rec

    def classify(self, support: Support, seed=None) -> ClassRecord:
        """Put generic values on ``support`` and file the resulting class."""
        if support.dims != self.dims:
            raise DimensionError(f"support dims {support.dims} differ from registry dims {self.dims}")
        seed = derive_seed(seed) if seed is None else seed
        vector = self._vector_for(support, seed, self.prime)
        return self.observe(vector, support, seed=seed)

    def classify_state(self, state: State) -> ClassRecord:
        """File an explicit state (its own coefficients, no confirmation pass)."""
        if state.dims != self.dims:
            raise DimensionError(f"state dims {state.dims} differ from registry dims {self.dims}")
        vec = invariant_vector(state, self.family).values
        return self.observe(vec, state.support, confirm=False)

    # -- MEC --------------------------------------------------------------
    def compute_mec_signature(self, seed=0) -> MecSignature:
        self.mec_signature = mec_signature(self.dims, seed, prime=self.prime)
        return self.mec_signature

    def is_mes(self, state: State) -> bool:
        if self.mec_signature is None:
            self.compute_mec_signature()
        return invariant_vector(state, self.family).values == self.mec_signature.vector

    # -- ordering / merging ---------------------------------------------------
    def canonical_records(self) -> list[ClassRecord]:
        return sorted(self.records.values(), key=lambda r: canonical_key(r.vector))

    def canonicalize(self) -> "ClassRegistry":
        """Relabel records 0..m-1 in canonical export order (in place)."""
        for label, rec in enumerate(self.canonical_records()):
            rec.label = label
        self.records = {rec.vector: rec for rec in self.canonical_records()}
        return self

    def labels(self) -> dict[tuple[int, ...], int]:
        """Canonical label for every stored vector."""
        return {rec.vector: k for k, rec in enumerate(self.canonical_records())}

    def merge(self, other: "ClassRegistry") -> "ClassRegistry":
        """Union of two registries with visit counts added."""
        if other.dims != self.dims:
            raise DimensionError(f"cannot merge registries for {self.dims} and {other.dims}")
        out = ClassRegistry(self.dims, self.prime, self.second_prime, self.family)
        out.mec_signature = self.mec_signature or other.mec_signature
        for reg in (self, other):
            for rec in reg.records.values():
                mine = out.records.get(rec.vector)
                if mine is None:
                    mine = out.records[rec.vector] = ClassRecord(len(out.records), rec.vector)
                mine.visit_count += rec.visit_count
                for s in rec.representatives:
                    mine.add_representative(s)
                if rec.min_observed_length is not None and (
                    mine.min_observed_length is None or rec.min_observed_length < mine.min_observed_length
                ):
                    mine.min_observed_length = rec.min_observed_length
            out.disagreements.extend(reg.disagreements)
        return out.canonicalize()

    # -- persistence --------------------------------------------------------
    def to_json_dict(self) -> dict:
        recs = []
        for label, rec in enumerate(self.canonical_records()):
            recs.append(
                {
                    "label": label,
                    "vector": list(rec.vector),
                    "visit_count": rec.visit_count,
                    "min_observed_length": rec.min_observed_length,
                    "representatives": [s.to_list() for s in rec.representatives],
                }
            )
        sig = None
        if self.mec_signature is not None:
            sig = {"vector": list(self.mec_signature.vector), "confirmation_count": self.mec_signature.confirmation_count}
        return {
            "format": FORMAT,
            "version": FORMAT_VERSION,
            "dims": list(self.dims),
            "prime": self.prime,
            "second_prime": self.second_prime,
            "family_hash": self.family.hash,
            "mec_signature": sig,
            "records": recs,
        }

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_json_dict(), indent=1) + "\n", encoding="utf-8")
        return path

    @classmethod
    def from_json_dict(cls, data, dims=None) -> "ClassRegistry":
        if not isinstance(data, dict) or data.get("format") != FORMAT:
            raise RegistryFormatError("not a class registry file")
        if data.get("version") != FORMAT_VERSION:
            raise RegistryFormatError(f"registry version {data.get('version')} != {FORMAT_VERSION}")
        try:
            reg = cls(data["dims"], data["prime"], data["second_prime"])
            if dims is not None and check_dims(dims) != reg.dims:
                raise RegistryFormatError(f"registry is for dims {reg.dims}, expected {tuple(dims)}")
            if data["family_hash"] != reg.family.hash:
                raise RegistryFormatError("family ordering of the file does not match this build")
            if data["mec_signature"] is not None:
                sig = data["mec_signature"]
                reg.mec_signature = MecSignature(tuple(sig["vector"]), int(sig["confirmation_count"]))
            for entry in data["records"]:
                vec = tuple(int(x) for x in entry["vector"])
                rec = ClassRecord(int(entry["label"]), vec, [], int(entry["visit_count"]), entry["min_observed_length"])
                rec.representatives = [Support(reg.dims, frozenset(map(tuple, s))) for s in entry["representatives"]]
                reg.records[vec] = rec
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, RegistryFormatError):
                raise
            raise RegistryFormatError(f"malformed registry: {exc}") from exc
        return reg

    @classmethod
    def load(cls, path, dims=None) -> "ClassRegistry":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise RegistryFormatError(f"{path}: {exc}") from exc
        return cls.from_json_dict(data, dims)

    def __eq__(self, other):
        if not isinstance(other, ClassRegistry):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()


def save(registry: ClassRegistry, path) -> Path:
    return registry.save(path)


def load(path, dims=None) -> ClassRegistry:
    return ClassRegistry.load(path, dims)


@lru_cache(maxsize=64)
def _signature_cached(dims, seed, prime) -> MecSignature:
    family = enumerate_family(len(dims))
    full = Support.full(dims)
    failures = 0
    attempt = 0
    while True:
        draws = [
            invariant_vector(random_state(full, derive_seed(seed, attempt, k), prime), family).values
            for k in range(3)
        ]
        if len(set(draws)) == 1:
            return MecSignature(draws[0], 3)
        failures += 1
        logger.warning("MEC signature draws disagree for %s (attempt %d)", dims, attempt)
        if failures >= MAX_SIGNATURE_ATTEMPTS:
            raise SignatureInstabilityError(f"no stable generic vector for {dims} after {failures} attempts")
        attempt += 1


def mec_signature(dims, seed=0, prime: int = PRIME) -> MecSignature:
    """Invariant vector of typical full-support states, agreed on by 3 draws."""
    return _signature_cached(check_dims(dims), seed, prime)


def is_mes(state: State, signature: MecSignature | None = None) -> bool:
    """True iff ``state`` has the same invariant vector as a typical state."""
    if signature is None:
        prime = state.prime if state.backend == "fp" else PRIME
        signature = mec_signature(state.dims, prime=prime)
    return invariant_vector(state).values == signature.vector


@dataclass
class PatternDistribution:
    """Exhaustive ``(length, class)`` counts over every support pattern."""

    dims: tuple[int, ...]
    counts: Counter
    registry: ClassRegistry

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def per_length(self) -> dict[int, int]:
        out: Counter = Counter()
        for (length, _), c in self.counts.items():
            out[length] += c
        return dict(sorted(out.items()))

    def rows(self) -> list[tuple[int, int, int]]:
        """``(length, class_label, count)`` with canonical labels."""
        labels = self.registry.labels()
        return sorted((length, labels[vec], c) for (length, vec), c in self.counts.items())

    def to_csv(self) -> str:
        lines = ["length,class_label,count"]
        lines += [f"{a},{b},{c}" for a, b, c in self.rows()]
        return "\n".join(lines) + "\n"


def enumerate_patterns(dims, seed=0, prime: int = PRIME) -> PatternDistribution:
    """Classify all ``2^prod(d)`` supports with generic values.

    Limited to ``prod(d) <= 20``.
    """
    dims = check_dims(dims)
    total = math.prod(dims)
    if total > MAX_EXHAUSTIVE_DIM:
        raise ValueError(f"exhaustive enumeration needs prod(dims) <= {MAX_EXHAUSTIVE_DIM}, got {total}")
    registry = ClassRegistry(dims, prime)
    registry.compute_mec_signature(seed)
    rng = np.random.default_rng(seed)
    counts: Counter = Counter()
    for bits in range(1 << total):
        offs = [k for k in range(total) if bits >> k & 1]
        dense = dense_from_offsets(dims, offs, random_values(rng, len(offs), prime))
        vec = dense_invariants(dense, registry.family, prime)
        support = Support.from_offsets(dims, offs)
        rec = registry.observe(vec, support, seed=derive_seed(seed, bits))
        counts[(len(offs), rec.vector)] += 1
    registry.canonicalize()
    return PatternDistribution(dims, counts, registry)


@dataclass(frozen=True)
class MinLengthResult:
    """Shortest MES length found; ``exact`` is False for sampled upper bounds."""

    dims: tuple[int, ...]
    length: int
    exact: bool
    witness: Support
    tried: int


def _mes_test(dims, family, signature, prime):
    order = [k for k in range(len(family) - 1) if len(family.antichains[k]) > 1]

    def test(offs, values) -> bool:
        return dense_matches(dense_from_offsets(dims, offs, values), family, prime, signature.vector, order)

    return test


def min_length(dims, mode: str = "exact", samples: int = 10_000, seed=0, prime: int = PRIME) -> MinLengthResult:
    """Smallest support size carrying an MES.

    ``mode="exact"`` scans every pattern by increasing length (needs
    ``prod(d) <= 20``); ``mode="monte-carlo"`` tries ``samples`` random
    supports per length and returns an upper bound.
    """
    dims = check_dims(dims)
    total = math.prod(dims)
    family = enumerate_family(len(dims))
    signature = mec_signature(dims, seed, prime)
    test = _mes_test(dims, family, signature, prime)
    rng = np.random.default_rng(seed)
    tried = 0
    # every unfolding of an MES has full rank, and rank never exceeds the support size
    start = max(min(d, total // d) for d in dims)
    if mode == "exact":
        if total > MAX_EXHAUSTIVE_DIM:
            raise ValueError(f"exact search needs prod(dims) <= {MAX_EXHAUSTIVE_DIM}, got {total}")
        for length in range(start, total + 1):
            for offs in itertools.combinations(range(total), length):
                tried += 1
                if test(list(offs), random_values(rng, length, prime)):
                    return MinLengthResult(dims, length, True, Support.from_offsets(dims, offs), tried)
    elif mode in ("monte-carlo", "mc"):
        for length in range(start, total + 1):
            n_draws = min(samples, math.comb(total, length))
            for _ in range(n_draws):
                tried += 1
                offs = np.sort(rng.choice(total, size=length, replace=False))
                if test(offs.tolist(), random_values(rng, length, prime)):
                    return MinLengthResult(dims, length, False, Support.from_offsets(dims, offs.tolist()), tried)
    else:
        raise ValueError(f"unknown mode {mode!r}; use 'exact' or 'monte-carlo'")
    raise RuntimeError(f"no MES found for {dims}")  # unreachable: full support is typical
