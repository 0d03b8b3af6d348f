"""Acceptance criteria 1-11.

Each test records one ``criterion N: PASS|FAIL|SOFT`` line that is printed
in the terminal summary.  Reference numbers come from the bundled expected
CSVs; derived numbers are checked against independent computations.
Criterion 11 is reported and never asserted.
"""

from __future__ import annotations

import time
from collections import Counter
from contextlib import contextmanager
from functools import lru_cache

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from mectools.antichains import enumerate_family
from mectools.constructions import s3_principal, s3_symmetric_state, sn_symmetric_state
from mectools.formulas import conjectured_principal, generic_principal, max_location, principal_table, recurrence_check
from mectools.invariants import invariant_vector
from mectools.markov import StochasticMatrix, expected_steps, expected_steps_series, from_counts, fundamental_matrix
from mectools.registry import enumerate_patterns, is_mes, min_length
from mectools.reproduce import load_expected, parse_dims
from mectools.tensor import Support, random_state, truncate
from mectools.walks import fraction_grid, run_ensemble, symmetric_path_steps

SEED = 0


@lru_cache(maxsize=None)
def ensemble(dims, count):
    return run_ensemble(dims, count, SEED)


class Failures:
    def __init__(self):
        self.items: list[str] = []

    def check(self, ok: bool, what: str) -> bool:
        if not ok:
            self.items.append(what)
        return ok


@contextmanager
def criterion(number: int, title: str, budget: float, soft: bool = False):
    fails = Failures()
    notes: list[str] = []
    start = time.perf_counter()
    error = None
    try:
        yield fails, notes
    except Exception as exc:  # recorded, then re-raised below
        error = exc
    elapsed = time.perf_counter() - start
    if elapsed > budget:
        fails.items.append(f"took {elapsed:.1f}s > {budget:.0f}s")
    if error is not None:
        fails.items.append(f"error: {error!r}")
    status = "SOFT" if soft else ("PASS" if not fails.items else "FAIL")
    detail = "; ".join(notes + ([f"failed: {', '.join(fails.items)}"] if fails.items else []))
    line = f"criterion {number}: {status} {title} [{elapsed:.1f}s] {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)
    if error is not None and not soft:
        raise error
    if fails.items and not soft:
        pytest.fail(line, pytrace=False)


def test_criterion_01_family_counts():
    with criterion(1, "family counts", 10) as (f, notes):
        counts = {n: len(enumerate_family(n)) for n in (3, 4, 5)}
        notes.append(str(counts))
        f.check(counts == {3: 4, 4: 19, 5: 167}, "counts")


def test_criterion_02_catalog_222():
    with criterion(2, "(2,2,2) class catalog", 5) as (f, notes):
        dist = enumerate_patterns((2, 2, 2), SEED)
        vectors = [r.vector for r in dist.registry.canonical_records()]
        want = [tuple(int(x) for x in r["vector"].split()) for r in load_expected("rw_counts_222.csv")]
        f.check(vectors == want, "class vectors")
        mec = dist.registry[vectors[-1]]
        length2 = {frozenset(s.positions) for s in mec.representatives if s.length == 2}
        js = {frozenset(tuple(int(c) for c in p) for p in r["positions"].split()) for r in load_expected("fig3_mec_length2.csv")}
        f.check(length2 == js, "length-2 MEC supports")
        notes.append(f"{len(vectors)} classes, {len(length2)} length-2 MEC supports")


def _sequence(name):
    return {int(r["d"]): int(r["N"]) for r in load_expected(name)}


def test_criterion_03_principal_tables():
    with criterion(3, "principal-invariant tables", 600) as (f, notes):
        grid = {}
        for row in load_expected("table3.csv"):
            for d3 in range(1, 17):
                grid[(3, int(row["d2/d3"]), d3)] = int(row[str(d3)])
        engine = principal_table((3, None, None), [range(3, 9)] * 2, "engine", seed=SEED)
        f.check(all(grid[k] == v for k, v in engine.values.items()), "table 3 engine block")
        formula = principal_table((3, None, None), [range(1, 17)] * 2)
        f.check(all(grid[k] == v for k, v in formula.values.items()), "table 3 formula grid")
        checked = len(engine.values)
        for name, fixed, cells in [("table5.csv", (2, 2, 2), None), ("table6.csv", (2, 2, 3), None), ("table9.csv", (2, 2, 2, 2), (1, 2, 8, 16))]:
            want = _sequence(name)
            for d in cells or sorted(want):
                checked += 1
                f.check(generic_principal(fixed + (d,), SEED) == want[d], f"{name} d={d}")
        rng = np.random.default_rng(SEED)
        for name, fixed in [("table7.csv", (2, 2, 4)), ("table8.csv", (2, 3, 3)), ("table10.csv", (2, 2, 2, 3))]:
            want = _sequence(name)
            f.check(all(conjectured_principal(fixed + (d,)) == v for d, v in want.items()), f"{name} formula")
            for d in rng.choice(sorted(want), size=5, replace=False):
                checked += 1
                f.check(generic_principal(fixed + (int(d),), SEED) == want[int(d)], f"{name} spot d={d}")
        notes.append(f"{checked} engine cells")


def _runs(text):
    out = Counter()
    for run in text.split():
        v, m = run.split("^")
        out[int(v)] += int(m)
    return out


def test_criterion_04_hypercubic_vectors():
    with criterion(4, "hypercubic MEC vectors", 600) as (f, notes):
        for row in load_expected("table2.csv"):
            dims = parse_dims(row["dims"])
            if len(dims) == 6:
                continue  # stretch row, reported by the reproduce harness
            vec = invariant_vector(random_state(Support.full(dims), SEED)).values
            f.check(Counter(vec) == _runs(row["runs"]), row["dims"])
        notes.append("six-qubit row is a stretch target and not gated")


def test_criterion_05_symmetric_states():
    with criterion(5, "symmetric construction", 300) as (f, notes):
        for d in range(2, 8):
            f.check(invariant_vector(s3_symmetric_state(d)).values == (0, 0, 0, s3_principal(d)), f"s3 d={d}")
        cases = [(3, d) for d in range(2, 8)] + [(4, d) for d in (2, 3, 4)] + [(5, d) for d in (2, 3)]
        passed = []
        for n, d in cases:
            ok = is_mes(sn_symmetric_state(n, d))
            f.check(ok, f"MES n={n} d={d}")
            if ok:
                passed.append((n, d))
        notes.append(f"MES for {passed}")


def test_criterion_06_shortest_lengths():
    with criterion(6, "shortest lengths", 900) as (f, notes):
        exact = {(2, 2, 2): 2, (2, 2, 3): 4, (2, 2, 4): 4, (2, 2, 5): 4, (2, 3, 3): 4}
        for dims, want in exact.items():
            f.check(min_length(dims, "exact", seed=SEED).length == want, f"exact {dims}")
        found = {}
        for dims, printed in {(3, 3, 3): 7, (2, 2, 2, 2): 6}.items():
            found[dims] = min_length(dims, "monte-carlo", samples=10_000, seed=SEED).length
            f.check(found[dims] <= printed + 1, f"sampled {dims}")
        notes.append(f"sampled bounds {found}")


def _printed_p():
    rows = load_expected("p_222.csv")
    return np.array([[float(r[str(j)]) for j in range(7)] for r in rows])


def test_criterion_07_walks_222():
    with criterion(7, "(2,2,2) random walks", 120) as (f, notes):
        ens = ensemble((2, 2, 2), 10_000)
        counts = {label: c for label, _, c in ens.visit_counts()}
        for row in load_expected("rw_counts_222.csv"):
            want = int(row["count"])
            got = counts.get(int(row["label"]), 0)
            f.check(abs(got - want) <= 0.05 * want, f"C{row['label']} {got} vs {want}")
        P = from_counts(ens.transition_counts())
        diff = np.abs(P.P - _printed_p()).max()
        f.check(diff <= 0.03, f"P max diff {diff:.3f}")
        q_mean = ens.mean_first_step()
        q_fund = expected_steps(P)[0]
        f.check(abs(q_mean - 3.63) <= 0.1, f"mean {q_mean:.3f}")
        f.check(abs(q_fund - 3.63) <= 0.1, f"fundamental {q_fund:.3f}")
        notes.append(f"P diff {diff:.3f}, Q0 mean {q_mean:.3f}, Q0 fundamental {q_fund:.3f}")


def test_criterion_08_walks_444_333():
    with criterion(8, "(4,4,4) and (3,3,3) random walks", 1200) as (f, notes):
        ens = ensemble((4, 4, 4), 10_000)
        lo, mode, mean = min(ens.first_steps), ens.mode_first_step(), ens.mean_first_step()
        f.check(lo == 10, f"min {lo}")
        f.check(abs(mode - 13) <= 1, f"mode {mode}")
        f.check(abs(mean - 14.0) <= 0.5, f"mean {mean:.2f}")
        q333 = ensemble((3, 3, 3), 10_000).mean_first_step()
        f.check(abs(q333 - 11.0) <= 0.3, f"(3,3,3) mean {q333:.2f}")
        notes.append(f"(4,4,4) min {lo} mode {mode} mean {mean:.2f}; (3,3,3) mean {q333:.2f}")


def test_criterion_09_markov_equivalence():
    with criterion(9, "Markov equivalence", 10) as (f, notes):
        P = StochasticMatrix.normalized(_printed_p())
        q_pub = np.array([float(r["q"]) for r in load_expected("q_222.csv")])
        f_pub = np.array([[float(r[str(j)]) for j in range(6)] for r in load_expected("fundamental_222.csv")])
        q = expected_steps(P)
        gap = np.abs(q - expected_steps_series(P)).max()
        f.check(np.abs(q - q_pub).max() <= 0.02, "Q")
        f.check(np.abs(fundamental_matrix(P) - f_pub).max() <= 0.01, "fundamental matrix")
        f.check(gap <= 1e-6, "series vs fundamental")
        notes.append(f"Q max diff {np.abs(q - q_pub).max():.4f}, series gap {gap:.1e}")


def test_criterion_10_identities_and_truncation():
    with criterion(10, "finite-difference identities, peaks, truncation", 300) as (f, notes):
        engine = principal_table((3, None, None), [range(3, 9)] * 2, "engine", seed=SEED)
        for axes in (1, 2, (1, 2)):
            f.check(recurrence_check(engine, axes) == [], f"recurrence {axes}")
        for name, fixed in [("table5.csv", (2, 2, 2)), ("table6.csv", (2, 2, 3)), ("table7.csv", (2, 2, 4)),
                            ("table8.csv", (2, 3, 3)), ("table9.csv", (2, 2, 2, 2)), ("table10.csv", (2, 2, 2, 3))]:
            want = _sequence(name)
            top = max(want.values())
            loc = max_location(fixed + (None,), len(fixed) + 1)
            f.check(loc.value == top and {d for d, v in want.items() if v == top} == set(loc.argmax), f"peak {name}")
        big = s3_symmetric_state(5)
        f.check(is_mes(big), "(5,5,5) symmetric state is MES")
        t455 = truncate(big, (4, 5, 5))
        t355 = truncate(big, (3, 5, 5))
        f.check(is_mes(t455), f"(4,5,5) truncation MES (principal {invariant_vector(t455).principal} vs generic {conjectured_principal((4, 5, 5))})")
        f.check(not is_mes(t355), "(3,5,5) truncation non-MES")


def test_criterion_11_soft_targets():
    with criterion(11, "soft targets", 3600, soft=True) as (f, notes):
        classes = len(ensemble((3, 3, 3), 200_000).registry)
        notes.append(f"(3,3,3) classes in 2e5 walks: {classes} (target >= 30)")
        best = {d: symmetric_path_steps(3, d, seed=SEED, samples=200).minimum for d in range(3, 8)}
        notes.append("best symmetric-state steps " + ", ".join(f"d={d}: {v} (4d-5={4 * d - 5})" for d, v in best.items()))
        grid = fraction_grid(2, range(1, 7), 1000, SEED)
        diag = np.diag(grid)[1:]
        notes.append(f"fraction diagonal decreasing: {bool(np.all(np.diff(diag) < 0))}")
