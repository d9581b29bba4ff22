import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import fac
from scholarrank.ranking import (
    bias_table,
    discrepancy_report,
    group_correlations,
    rank_programs,
    rankings_csv,
    scatter_csv,
    scatter_data,
)
from scholarrank.scholar import ScoreResult
from scholarrank.synthgen import SynthConfig, generate


def test_rank_ties():
    scores = [("a", 5.0), ("b", 5.0), ("c", 5.0), ("d", 5.0), ("e", 4.4)]
    assert [e.rank for e in rank_programs(scores)] == [1, 1, 1, 1, 5]


def test_rank_distinct():
    entries = rank_programs([(str(i), float(i)) for i in range(6)])
    assert [e.rank for e in entries] == [1, 2, 3, 4, 5, 6]
    assert [e.university_id for e in entries] == ["5", "4", "3", "2", "1", "0"]


def test_rank_ties_listed_alphabetically():
    entries = rank_programs([("zeta", 3.0), ("alpha", 3.0), ("mid", 4.0)])
    assert [e.university_id for e in entries] == ["mid", "alpha", "zeta"]


def test_rank_by_raw_and_usn_delta():
    scores = [ScoreResult("a", 3.04, 3.0), ScoreResult("b", 3.01, 3.0)]
    entries = rank_programs(scores, {"a": 2.4, "b": None}, by_raw=True)
    assert [(e.university_id, e.rank) for e in entries] == [("a", 1), ("b", 2)]
    assert entries[0].delta == pytest.approx(0.6) and entries[1].delta is None
    assert [e.rank for e in rank_programs(scores)] == [1, 1]


score_lists = st.lists(
    st.tuples(st.text("abcdefgh", min_size=1, max_size=6), st.integers(10, 50).map(lambda v: v / 10)),
    max_size=40, unique_by=lambda t: t[0],
)


@given(score_lists, st.randoms())
def test_rank_properties(scores, rnd):
    entries = rank_programs(scores)
    displays = [e.display_score for e in entries]
    assert displays == sorted(displays, reverse=True)
    ranks = [e.rank for e in entries]
    assert ranks == sorted(ranks)
    for e in entries:
        assert e.rank == 1 + sum(d > e.display_score for d in displays)
    shuffled = scores[:]
    rnd.shuffle(shuffled)
    assert rank_programs(shuffled) == entries


def test_table7_rank_column(table7):
    entries = rank_programs([(r.university, r.scholar) for r in table7])
    published = {r.university: r.rank for r in table7}
    assert all(published[e.university_id] == e.rank for e in entries)


def test_rankings_csv_format():
    text = rankings_csv(rank_programs([("a", 3.0)], {"a": 2.4}))
    assert text == "rank,university,scholar,usn,delta\n1,a,3.0,2.4,0.600\n"


def test_group_correlations_fixture(table7):
    scholar = {r.university: r.scholar for r in table7}
    usn = {r.university: r.usn_score for r in table7}
    g = group_correlations(scholar, usn, 2.7, 2.0)
    assert (g.high.count, g.low.count) == (62, 57)
    assert g.high.pearson == pytest.approx(0.913, abs=0.02)
    assert g.low.pearson == pytest.approx(0.360, abs=0.06)


def test_group_split_above_max_is_flagged():
    scholar = {str(i): float(i) for i in range(10)}
    usn = {str(i): 2.0 + i / 10 for i in range(10)}
    g = group_correlations(scholar, usn, split=9.0)
    assert g.high.count == 0 and g.high.insufficient
    assert g.low.count == 10 and g.low.pearson == pytest.approx(1.0)
    with pytest.raises(ValueError):
        group_correlations(scholar, usn, split=1.0, min_usn=2.0)


def test_discrepancy_examples():
    scholar = {"Colorado State": 3.0, "UT Austin": 3.7, "Same": 2.5, "Portland": 2.7}
    usn = {"Colorado State": 2.4, "UT Austin": 4.3, "Same": 2.5, "Portland": None}
    report = dict(discrepancy_report(scholar, usn))
    assert report["Colorado State"] == pytest.approx(0.6)
    assert report["UT Austin"] == pytest.approx(-0.6)
    assert report["Same"] == 0
    assert report["Portland"] == pytest.approx(1.2)
    ordered = [abs(d) for _, d in discrepancy_report(scholar, usn)]
    assert ordered == sorted(ordered, reverse=True)


@given(st.dictionaries(st.text("abc", min_size=1, max_size=3),
                       st.tuples(st.floats(1, 5), st.floats(2, 5)), max_size=10))
def test_discrepancy_antisymmetric(pairs):
    a = {k: v[0] for k, v in pairs.items()}
    b = {k: v[1] for k, v in pairs.items()}
    forward = dict(discrepancy_report(a, b))
    backward = dict(discrepancy_report(b, a))
    for k in pairs:
        assert forward[k] == pytest.approx(-backward[k], abs=1e-8)


def test_fixture_discrepancies(table7):
    scholar = {r.university: r.scholar for r in table7}
    usn = {r.university: r.usn_score for r in table7}
    report = dict(discrepancy_report(scholar, usn))
    assert report["Colorado State University"] == pytest.approx(0.6)
    assert report["University of Texas - Austin"] == pytest.approx(-0.6)
    assert report["University of California - Santa Cruz"] == pytest.approx(0.7)


def test_bias_table_examples():
    everyone = bias_table([fac(t, profile=True) for t in range(50)])
    assert all(without == 0 for _, without in everyone.deciles)
    pair = bias_table([fac(0, profile=False), fac(1000, profile=True)])
    assert pair.deciles[0] == (0, 1)
    assert pair.deciles[9] == (1, 0)
    assert pair.total == 2
    with pytest.raises(ValueError):
        bias_table([fac(None)])


@given(st.sets(st.integers(0, 5000), min_size=1, max_size=300))
def test_bias_table_balanced_deciles(values):
    faculty = [fac(v, profile=v % 2 == 0) for v in values]
    table = bias_table(faculty)
    sizes = [a + b for a, b in table.deciles]
    assert sum(sizes) == len(values)
    if len(values) >= 10:
        assert max(sizes) - min(sizes) <= 1


def test_bias_table_synthetic_shape():
    recs = [r for r in generate(SynthConfig(n=5000, assistant_fraction=0, seed=4))]
    table = bias_table(recs)
    share_without = [b / (a + b) for a, b in table.deciles]
    assert share_without[0] > share_without[9]


def test_scatter():
    scholar = {"b": 2.0, "a": 3.0}
    rows = scatter_data(scholar, {"a": 2.5})
    assert rows == [("a", 3.0, 2.5), ("b", 2.0, 1.5)]
    assert scatter_csv([]) == "university,joint_score,usn\n"
    items = list(scholar.items())
    random.Random(0).shuffle(items)
    assert scatter_data(dict(items), {"a": 2.5}) == rows


def test_scatter_fixture(table7):
    scholar = {r.university: r.scholar for r in table7}
    usn = {r.university: r.usn_score for r in table7}
    rows = scatter_data(scholar, usn)
    assert len(rows) == 173
    assert sum(1 for _, _, u in rows if u == 1.5) == 54
