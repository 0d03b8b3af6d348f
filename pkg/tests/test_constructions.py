import pytest

from mectools.constructions import SymmetricSpec, s3_principal, s3_symmetric_state, sn_symmetric_state, symmetric_length
from mectools.formulas import conjectured_principal
from mectools.invariants import invariant_vector, principal_invariant
from mectools.registry import is_mes


@pytest.mark.parametrize("n,d", [(3, 2), (3, 5), (4, 2), (4, 3), (5, 2)])
def test_length_formula(n, d):
    state = sn_symmetric_state(n, d)
    assert state.length == symmetric_length(n, d)
    assert len(set(SymmetricSpec(n, d).positions())) == state.length


def test_three_party_terms():
    for d in range(2, 8):
        assert s3_symmetric_state(d).length == 4 * d - 3


def test_three_party_support():
    assert set(s3_symmetric_state(3).coeffs) == {
        (1, 1, 1),
        (2, 2, 1), (3, 3, 1),
        (2, 1, 2), (3, 1, 3),
        (1, 2, 2), (1, 3, 3),
        (2, 2, 2), (3, 3, 3),
    }


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_three_party_vector(d):
    assert invariant_vector(s3_symmetric_state(d)).values == (0, 0, 0, s3_principal(d))


def test_s3_principal_matches_conjecture():
    for d in range(2, 12):
        assert s3_principal(d) == conjectured_principal((d, d, d))


def test_symmetric_under_permutation():
    state = sn_symmetric_state(4, 3)
    for perm in [(1, 0, 2, 3), (3, 2, 1, 0)]:
        assert state.permute(perm) == state


def test_corner_relabel():
    state = s3_symmetric_state(4, corner=(2, 3, 4))
    assert (2, 3, 4) in state.coeffs
    assert state.length == 13
    assert is_mes(state)


def test_four_party_principal_matches_conjecture():
    # the principal invariant of the symmetric state reaches the generic value
    for d in (2, 3):
        assert principal_invariant(sn_symmetric_state(4, d)) == conjectured_principal((d,) * 4)


@pytest.mark.parametrize("kwargs", [dict(n=2, d=3), dict(n=3, d=1), dict(n=3, d=3, corner=(4, 1, 1))])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SymmetricSpec(**kwargs)
    with pytest.raises(ValueError):
        symmetric_length(1, 2)
