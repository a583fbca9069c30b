import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecotrade.errors import EcotradeError
from ecotrade.mutualistic import BinaryMatrix
from ecotrade.nestedness import analyze
from ecotrade.rankings import RankEntry, RankTable, ecolo_rank, rank_series, volume_rank


def _table(year, labels, scheme="ecolo", flow="import", axis="countries"):
    return RankTable(year, flow, scheme,
                     tuple(RankEntry(i + 1, lab, float(i + 1)) for i, lab in enumerate(labels)), axis)


def test_ecolo_rank_follows_packed_order():
    # A is the generalist, C the specialist; D is empty and gets trimmed
    cells = np.array([[0, 0, 1], [1, 1, 1], [0, 1, 1], [0, 0, 0]], dtype=bool)
    q = BinaryMatrix(("C", "A", "B", "D"), ("p1", "p2", "p3"), cells)
    res, dr, dc = analyze(q)
    countries, products = ecolo_rank(res, dr, dc, {"D": 5.0}, year=2000)
    assert countries.labels == ["A", "B", "C", "D"]
    assert products.labels == ["p3", "p2", "p1"]
    assert countries.axis == "countries" and products.axis == "products"
    assert [e.rank for e in countries.entries] == [1, 2, 3, 4]
    assert countries.rank_of("D") == 4


def test_dropped_labels_ordered_by_volume():
    q = BinaryMatrix(("a", "b", "c", "d"), ("x",), np.array([[1], [0], [0], [0]], dtype=bool))
    res, dr, dc = analyze(q)
    table, _ = ecolo_rank(res, dr, dc, {"b": 1.0, "c": 9.0, "d": 1.0})
    assert table.labels == ["a", "c", "b", "d"]


def test_volume_rank_example():
    usd = np.array([[10.0, 0.0, 5.0], [0.0, 20.0, 5.0]])
    t = volume_rank(usd, ["p", "q"], ["A", "B", "C"], "countries", year=1999, flow="export")
    assert t.labels == ["B", "A", "C"]
    assert [e.score for e in t.entries] == [20.0, 10.0, 10.0]
    assert t.scheme == "volume" and t.year == 1999
    assert volume_rank(usd, ["p", "q"], ["A", "B", "C"], "products").labels == ["q", "p"]


def test_volume_rank_ties_by_label():
    t = volume_rank(np.ones((1, 3)), ["p"], ["Z", "M", "A"], "countries")
    assert t.labels == ["A", "M", "Z"]


def test_volume_rank_rejects_negative():
    with pytest.raises(EcotradeError):
        volume_rank(-np.ones((1, 1)), ["p"], ["A"], "countries")


def test_volume_rank_unknown_axis():
    with pytest.raises(EcotradeError):
        volume_rank(np.ones((1, 1)), ["p"], ["A"], "regions")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1e9), min_size=1, max_size=12))
def test_volume_rank_is_a_permutation(values):
    labels = [f"L{i:02d}" for i in range(len(values))]
    t = volume_rank(np.array([values]), ["p"], labels, "countries")
    assert sorted(t.labels) == labels
    scores = [e.score for e in t.entries]
    assert scores == sorted(scores, reverse=True)


def test_table_validation():
    with pytest.raises(EcotradeError):
        RankTable(1, "import", "ecolo", (RankEntry(1, "a", 1.0), RankEntry(1, "b", 1.0)))
    with pytest.raises(EcotradeError):
        RankTable(1, "import", "ecolo", (RankEntry(1, "a", 1.0), RankEntry(2, "a", 1.0)))
    with pytest.raises(EcotradeError):
        RankTable(1, "import", "fame", ())


def test_table_csv():
    t = _table(2000, ["A", "B"])
    assert t.to_csv() == "rank,label,score\n1,A,1.0\n2,B,2.0\n"


def test_rank_series_two_years():
    s = rank_series([_table(2001, ["B", "A"]), _table(2000, ["A", "B"])])
    assert s.years == (2000, 2001)
    assert s.rank("A", 2000) == 1 and s.rank("A", 2001) == 2
    assert s.top_k(2) == [(2000, "A", 1), (2000, "B", 2), (2001, "B", 1), (2001, "A", 2)]


def test_rank_series_top1():
    s = rank_series([_table(2000, ["A", "B"]), _table(2001, ["B", "A"])])
    assert s.top_k(1) == [(2000, "A", 1), (2001, "B", 1)]


def test_rank_series_gap_year():
    s = rank_series([_table(2000, ["A", "B"]), _table(2001, ["B"])])
    assert s.rank("A", 2001) is None
    assert (2001, "A", None) in s.top_k(2)


def test_rank_series_rejects_mixed():
    with pytest.raises(EcotradeError):
        rank_series([_table(2000, ["A"]), _table(2001, ["A"], scheme="volume")])
    with pytest.raises(EcotradeError):
        rank_series([_table(2000, ["A"]), _table(2000, ["A"])])
    with pytest.raises(EcotradeError):
        rank_series([])
