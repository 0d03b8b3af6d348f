import pytest

from mectools.reproduce import TARGETS, Options, Report, load_expected, reproduce

EXPECTED = [
    "table1.csv", "table2.csv", "table3.csv", "table4.csv", "table5.csv", "table6.csv", "table7.csv",
    "table8.csv", "table9.csv", "table10.csv", "lengths3.csv", "lengths4.csv", "mec_properties.csv",
    "rw_counts_222.csv", "p_222.csv", "q_222.csv", "fundamental_222.csv", "fig3_mec_length2.csv", "fig6.csv",
]


@pytest.mark.parametrize("name", EXPECTED)
def test_bundled_csvs_parse(name):
    rows = load_expected(name)
    assert rows and all(None not in r for r in rows)


def test_target_list():
    assert set(TARGETS) >= {"table1", "table10", "lengths3", "lengths4", "mec-properties", "rw-counts-222", "fig3", "fig4", "fig6", "fig7"}
    with pytest.raises(KeyError):
        reproduce("table99")


@pytest.mark.parametrize("target", ["table1", "table3", "table4", "table5", "table6", "table7", "table8", "table9", "table10", "fig3"])
def test_quick_targets_pass(target, tmp_path):
    rep = reproduce(target, Options(out_dir=tmp_path))
    assert rep.passed, rep.text()
    assert rep.files and all(p.exists() for p in rep.files)
    for p in rep.files:
        raw = p.read_bytes()
        assert b"\r\n" not in raw
        raw.decode("utf-8")


def test_report_logic():
    rep = Report("x")
    rep.add("a", True)
    rep.add("b", False, soft=True)
    assert rep.passed
    rep.add("c", False)
    assert not rep.passed
    assert rep.text().splitlines() == ["PASS x: a", "INFO x: b", "FAIL x: c"]
