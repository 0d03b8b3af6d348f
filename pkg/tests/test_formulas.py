import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mectools.formulas import (
    conjectured_min_length,
    conjectured_principal,
    generic_principal,
    max_location,
    polynomial_rows,
    principal_table,
    recurrence_check,
)


@settings(max_examples=25)
@given(st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 7)), st.integers(0, 2**32))
def test_conjecture_matches_engine_three_parties(dims, seed):
    assert conjectured_principal(dims) == generic_principal(dims, seed)


@pytest.mark.parametrize("dims", [(2, 2, 2, 2), (2, 2, 2, 3), (2, 2, 3, 3), (2, 2, 2, 8), (3, 3, 3, 3), (2, 2, 2, 2, 2)])
def test_conjecture_matches_engine_more_parties(dims):
    assert conjectured_principal(dims) == generic_principal(dims)


def test_dimension_two_rule():
    assert conjectured_principal((2, 4, 4)) == 1
    assert conjectured_principal((2, 5, 5)) == 2
    assert conjectured_principal((2, 4, 5)) == 0
    assert conjectured_principal((2, 2, 2)) == 0
    with pytest.raises(ValueError):
        conjectured_principal((3, 3))


def test_permutation_symmetric():
    for dims in [(3, 4, 5), (2, 3, 4, 5)]:
        assert conjectured_principal(dims) == conjectured_principal(dims[::-1])


def test_max_location_brute_force():
    for fixed in [(3, 3), (3, 4), (4, 4), (2, 2, 2), (2, 2, 3), (2, 2, 4), (2, 3, 3), (2, 2, 2, 2), (2, 2, 2, 3)]:
        template = fixed + (None,)
        loc = max_location(template, len(template))
        vals = {d: conjectured_principal(fixed + (d,)) for d in range(1, 60)}
        top = max(vals.values())
        assert loc.value == top
        assert set(loc.argmax) == {d for d, v in vals.items() if v == top}


def test_max_location_examples():
    assert max_location((2, 2, 2, None), 4).argmax == (4,)
    assert max_location((2, 3, 3, None), 4).value == 62
    assert max_location((2, 2, 2, 3, None), 5).argmax == (12,)
    with pytest.raises(ValueError):
        max_location((2, 2, None), 4)


def test_recurrence_holds_on_formula_grid():
    table = principal_table((3, None, None), [range(1, 17)] * 2)
    for axes in (1, 2, (1, 2)):
        assert recurrence_check(table, axes) == []


def test_recurrence_detects_tampering():
    table = principal_table((3, None, None), [range(3, 9)] * 2)
    values = dict(table.values)
    values[(3, 5, 5)] += 1
    assert recurrence_check(values, 1)


def test_engine_table_obeys_recurrence():
    table = principal_table((3, None, None), [range(3, 7)] * 2, source="engine")
    assert recurrence_check(table, 1) == [] and recurrence_check(table, (1, 2)) == []


def test_table_csv_and_compare():
    f = principal_table((2, 2, 2, None), [range(1, 8)])
    e = principal_table((2, 2, 2, None), [range(1, 8)], "engine")
    assert f.compare(e) == []
    lines = f.to_csv().splitlines()
    assert lines[0] == "d4,N"
    assert lines[4] == "4,7"
    grid = principal_table((3, None, None), [range(1, 4)] * 2).to_csv().splitlines()
    assert grid[0].startswith("d2/d3")
    with pytest.raises(ValueError):
        principal_table((3, None, None), [range(1, 3)])
    with pytest.raises(ValueError):
        principal_table((3, 3, None), [range(1, 3)], source="oracle")


def test_polynomial_rows_are_the_formula():
    for row in polynomial_rows():
        for d3 in range(row["d3_min"], row["d3_max"] + 1):
            assert -d3 * d3 + row["b"] * d3 - row["c"] == conjectured_principal((3, row["d2"], d3)) > 0
        assert conjectured_principal((3, row["d2"], row["d3_max"] + 1)) == 0


def test_min_length_formula():
    assert [conjectured_min_length(d) for d in [(2, 2, 2), (2, 2, 5), (2, 4, 4), (2, 4, 5), (3, 3, 3), (5, 5, 5)]] == [2, 4, 6, 8, 7, 13]
    with pytest.raises(ValueError):
        conjectured_min_length((2, 2, 2, 2))
