import itertools

import pytest

from mectools.antichains import (
    brute_force_family,
    canonical_order,
    compatible,
    enumerate_family,
    is_maximal_intersecting_antichain,
    mask_to_set,
    principal_antichain,
    proper_subsets,
    set_to_mask,
)


def test_mask_round_trip():
    for mask in range(1, 64):
        assert set_to_mask(mask_to_set(mask)) == mask
    with pytest.raises(ValueError):
        set_to_mask([0, 1])


def test_proper_subsets_count():
    assert len(proper_subsets(4)) == 14


def test_compatible():
    assert compatible(0b011, 0b110)
    assert not compatible(0b001, 0b011)  # nested
    assert not compatible(0b001, 0b010)  # disjoint


@pytest.mark.parametrize("n,count", [(2, 2), (3, 4), (4, 19), (5, 167), (6, 11747)])
def test_family_counts(n, count):
    assert len(enumerate_family(n, allow_long=n == 6)) == count


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dfs_matches_brute_force(n):
    fam = enumerate_family(n)
    assert list(fam.antichains) == canonical_order(brute_force_family(n), n)


def test_every_member_passes_checker():
    for n in (3, 4, 5):
        fam = enumerate_family(n)
        assert all(is_maximal_intersecting_antichain(ac, n) for ac in fam)
        assert len(set(fam.antichains)) == len(fam)


def test_checker_rejects():
    assert is_maximal_intersecting_antichain([0b001], 3)
    assert not is_maximal_intersecting_antichain([0b011, 0b101], 3)  # {2,3} can be added
    assert not is_maximal_intersecting_antichain([0b011, 0b001], 3)
    assert not is_maximal_intersecting_antichain([], 3)


def test_principal_is_last():
    for n in (3, 4, 5):
        fam = enumerate_family(n)
        assert fam.antichains[-1] == tuple(sorted(principal_antichain(n)))
        assert fam.principal_index == len(fam) - 1


def test_three_party_family():
    fam = enumerate_family(3)
    assert [[sorted(mask_to_set(m)) for m in ac] for ac in fam] == [[[1]], [[2]], [[3]], [[1, 2], [1, 3], [2, 3]]]


@pytest.mark.parametrize("n", [3, 4])
def test_relabel_is_permutation(n):
    fam = enumerate_family(n)
    for perm in itertools.permutations(range(n)):
        moved = fam.relabel(perm)
        assert sorted(moved) == list(range(len(fam)))
        assert moved[-1] == len(fam) - 1


def test_six_needs_flag():
    with pytest.raises(ValueError, match="allow_long"):
        enumerate_family(6)
    with pytest.raises(ValueError):
        enumerate_family(1)


def test_hash_stable():
    assert enumerate_family(4).hash == enumerate_family(4).hash
    assert enumerate_family(4).hash != enumerate_family(3).hash
