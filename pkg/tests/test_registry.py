import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mectools._validation import DimensionError
from mectools.registry import (
    ClassRegistry,
    RegistryFormatError,
    canonical_key,
    derive_seed,
    enumerate_patterns,
    is_mes,
    load,
    mec_signature,
    min_length,
    save,
)
from mectools.tensor import State, Support, random_state


def test_derive_seed_deterministic_and_distinct():
    assert derive_seed(0, 1) == derive_seed(0, 1)
    assert len({derive_seed(0, k) for k in range(100)}) == 100
    assert derive_seed(0, 1) != derive_seed(1, 0)
    assert derive_seed(None) != derive_seed(None)  # fresh entropy


def test_canonical_key_orders_by_total_then_lex():
    vecs = [(0, 0, 0, 0), (8, 8, 8, 8), (0, 0, 4, 3), (4, 0, 0, 3), (0, 4, 0, 3)]
    assert sorted(vecs, key=canonical_key) == [(8, 8, 8, 8), (0, 0, 4, 3), (0, 4, 0, 3), (4, 0, 0, 3), (0, 0, 0, 0)]


@pytest.mark.parametrize(
    "dims,vector",
    [((2, 2, 2), (0, 0, 0, 0)), ((3, 3, 3), (0, 0, 0, 2)), ((2, 2, 4), (0, 0, 0, 0)), ((2, 4, 4), (0, 0, 0, 1))],
)
def test_mec_signature(dims, vector):
    sig = mec_signature(dims)
    assert sig.vector == vector
    assert sig.confirmation_count >= 2


def test_mec_signature_stable_across_seeds():
    assert len({mec_signature((3, 3, 4), s).vector for s in range(4)}) == 1


def test_is_mes():
    assert is_mes(random_state(Support.full((3, 3, 3)), 11))
    assert not is_mes(State((3, 3, 3), {(1, 1, 1): 1}))
    ghz = State((2, 2, 2), {(1, 1, 1): 1, (2, 2, 2): 1})
    assert is_mes(ghz)


def _sample_registry(offsets_list, seed=0):
    reg = ClassRegistry((2, 2, 2))
    for k, offs in enumerate(offsets_list):
        reg.classify(Support.from_offsets((2, 2, 2), offs), seed=derive_seed(seed, k))
    return reg.canonicalize()


offsets_lists = st.lists(st.sets(st.integers(0, 7), max_size=8).map(sorted), min_size=1, max_size=6)


@given(offsets_lists, offsets_lists, offsets_lists)
def test_merge_associative_and_commutative(a, b, c):
    ra, rb, rc = _sample_registry(a), _sample_registry(b, 1), _sample_registry(c, 2)
    left = ra.merge(rb).merge(rc)
    right = ra.merge(rb.merge(rc))
    assert left == right
    swapped = rb.merge(ra)
    assert {v: r.visit_count for v, r in swapped.records.items()} == {v: r.visit_count for v, r in ra.merge(rb).records.items()}


def test_merge_dims_mismatch():
    with pytest.raises(DimensionError):
        ClassRegistry((2, 2, 2)).merge(ClassRegistry((2, 2, 3)))


def test_round_trip(tmp_path):
    reg = enumerate_patterns((2, 2, 2)).registry
    path = save(reg, tmp_path / "reg.json")
    back = load(path, dims=(2, 2, 2))
    assert back == reg
    assert [r.vector for r in back.canonical_records()] == [r.vector for r in reg.canonical_records()]


def test_load_rejects(tmp_path):
    reg = ClassRegistry((2, 2, 2))
    path = reg.save(tmp_path / "r.json")
    with pytest.raises(RegistryFormatError):
        load(path, dims=(2, 2, 3))
    data = json.loads(path.read_text())
    data["version"] = 99
    (tmp_path / "v.json").write_text(json.dumps(data))
    with pytest.raises(RegistryFormatError):
        load(tmp_path / "v.json")
    data["version"] = 1
    data["family_hash"] = "x"
    (tmp_path / "h.json").write_text(json.dumps(data))
    with pytest.raises(RegistryFormatError):
        load(tmp_path / "h.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(RegistryFormatError):
        load(tmp_path / "bad.json")


def test_representatives_capped_and_sorted():
    reg = ClassRegistry((2, 2, 2))
    full = Support.full((2, 2, 2))
    for k in range(20):
        reg.observe((1, 1, 1, 1), Support.from_offsets((2, 2, 2), [k % 8]), confirm=False)
    reg.observe((1, 1, 1, 1), full, confirm=False)
    rec = reg[(1, 1, 1, 1)]
    assert len(rec.representatives) <= 8
    keys = [s.sort_key() for s in rec.representatives]
    assert keys == sorted(keys)
    assert rec.visit_count == 21


def test_confirmation_resolves_to_minimum():
    reg = ClassRegistry((2, 2, 2))
    supp = Support.full((2, 2, 2))
    # a deliberately wrong first vector is replaced by the componentwise minimum of fresh draws
    rec = reg.observe((1, 1, 1, 1), supp, seed=3)
    assert rec.vector == (0, 0, 0, 0)
    assert reg.disagreements


def test_classify_dims_mismatch():
    with pytest.raises(DimensionError):
        ClassRegistry((2, 2, 2)).classify(Support.full((2, 2, 3)))


def test_pattern_distribution_222():
    dist = enumerate_patterns((2, 2, 2))
    assert dist.total == 256
    assert dist.per_length() == {k: math.comb(8, k) for k in range(9)}
    assert len(dist.registry) == 7
    assert dist.to_csv().splitlines()[0] == "length,class_label,count"


@pytest.mark.parametrize("dims,length", [((2, 2, 2), 2), ((2, 2, 3), 4), ((2, 3, 3), 4)])
def test_min_length_exact(dims, length):
    res = min_length(dims)
    assert res.exact and res.length == length
    assert res.witness.length == length


def test_min_length_sampled_is_upper_bound():
    res = min_length((2, 2, 3), "monte-carlo", samples=200)
    assert not res.exact and res.length >= 4


def test_min_length_errors():
    with pytest.raises(ValueError):
        min_length((3, 3, 3), "exact")
    with pytest.raises(ValueError):
        min_length((2, 2, 2), "bogus")
