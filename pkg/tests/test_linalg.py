import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import rank_mod_naive

from mectools._validation import PRIME
from mectools.antichains import enumerate_family
from mectools.invariants import dense_invariants
from mectools.linalg import nullity_mod, rank_float, rank_mod, row_basis_mod, singletons_and_principal

SMALL_P = 101


@st.composite
def matrices(draw, p=SMALL_P):
    r = draw(st.integers(1, 7))
    c = draw(st.integers(1, 7))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return np.array(vals, dtype=np.int64).reshape(r, c)


@given(matrices())
def test_rank_matches_naive_small_prime(m):
    assert rank_mod(m, SMALL_P) == rank_mod_naive(m.tolist(), SMALL_P)


@given(matrices(PRIME))
def test_rank_matches_naive_large_prime(m):
    assert rank_mod(m, PRIME) == rank_mod_naive(m.tolist(), PRIME)


@given(matrices())
def test_nullity_and_basis(m):
    r = rank_mod(m, SMALL_P)
    assert nullity_mod(m, SMALL_P) == m.shape[1] - r
    basis = row_basis_mod(m, SMALL_P)
    assert basis.shape[0] == r
    # the basis spans the same row space
    assert rank_mod(np.vstack([basis, m]), SMALL_P) == r


def test_rank_does_not_mutate_input():
    m = np.array([[2, 4], [1, 2]], dtype=np.int64)
    before = m.copy()
    rank_mod(m, SMALL_P)
    assert np.array_equal(m, before)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_low_rank_products_float_and_mod(k):
    rng = np.random.default_rng(k)
    a = rng.integers(-3, 4, size=(6, k))
    b = rng.integers(-3, 4, size=(k, 5))
    m = a @ b
    assert rank_float(m.astype(float)) == np.linalg.matrix_rank(m.astype(float))
    assert rank_mod(m % PRIME, PRIME) == np.linalg.matrix_rank(m.astype(float))


@pytest.mark.parametrize("dims", [(2, 2, 2), (2, 3, 4), (3, 3, 3), (2, 2, 2, 2), (2, 2, 3, 2)])
def test_fast_kernel_agrees_with_general_path(dims):
    rng = np.random.default_rng(sum(dims))
    fam = enumerate_family(len(dims))
    singles = [k for k, ac in enumerate(fam) if len(ac) == 1 and bin(ac[0]).count("1") == 1]
    for trial in range(30):
        dense = rng.integers(1, PRIME, size=dims) * (rng.random(dims) < rng.random())
        fast = singletons_and_principal(dense, PRIME)
        full = dense_invariants(dense, fam, PRIME)
        assert fast[-1] == full[-1]
        assert [fast[i] for i in range(len(dims))] == [full[k] for k in singles]
