from fractions import Fraction
from math import sqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moebius_rankone import symbolic as sym
from moebius_rankone.errors import InvalidArgument, InvalidParameters


def naive_blocks(p_seq, spacer_rows, count):
    """W_0 .. W_count by plain string concatenation."""
    words = ["0"]
    for n in range(count):
        w = words[-1]
        words.append("".join(w + "1" * s for s in spacer_rows[n][: p_seq[n]]))
    return words


def naive_positions(v, w):
    return [i for i in range(len(w) - len(v) + 1) if w.startswith(v, i)]


def test_chacon_heights_and_words():
    blocks = sym.build_blocks(sym.chacon(), 6)
    assert [b.height for b in blocks] == [1, 4, 13, 40, 121, 364, 1093]
    ref = naive_blocks([3] * 6, [(0, 1, 0)] * 6, 6)
    assert [b.word for b in blocks] == ref
    assert blocks[1].word == "0010"
    for b in blocks:
        assert b.zeros == 3**b.stage and b.zeros + b.ones == b.height


def test_height_recurrence_up_to_length_cap():
    params = sym.chacon()
    blocks = sym.build_blocks(params, 20, length_cap=10**5)
    stages = params.stage_list(21)
    for b, s, nxt in zip(blocks, stages, stages[1:]):
        assert nxt.height == s.p * s.height + sum(s.spacers)
        assert b.height == s.height
        assert (b.word is None) == (b.height > 10**5)
        if b.word is not None:
            assert len(b.word) == b.height


def test_offsets_match_string_search():
    params = sym.chacon()
    blocks = sym.build_blocks(params, 6)
    assert sym.occurrence_offsets(params, 1) == [0, 4, 9]
    assert sym.occurrence_offsets(sym.tripling_family(), 1) == [0, 3]
    for n in range(1, 6):
        st_ = sym.stage_at(params, n)
        found = naive_positions(blocks[n].word, blocks[n + 1].word)
        # every copy is a match; extra overlapping matches are allowed
        assert set(st_.offsets) <= set(found)


def test_limit_prefix_is_consistent():
    p = sym.limit_prefix(sym.chacon(), 500)
    assert len(p) == 500
    assert p.startswith(sym.build_blocks(sym.chacon(), 5)[5].word[:500])
    with pytest.raises(InvalidArgument):
        sym.limit_prefix(sym.chacon(), 11, length_cap=10)


def test_tripling_ratio_closed_form():
    series = sym.cylinder_measure(sym.tripling_family(), "1", 12)
    for n, r in enumerate(series.ratios):
        assert r == Fraction(3, 2) ** n - 1
    assert series.ratios[12] > 100


def test_chacon_spacer_frequency():
    series = sym.cylinder_measure(sym.chacon(), "1", 8)
    assert series.estimate == Fraction(3280, 6561)
    assert abs(float(series.estimate) - 0.5) < 1e-4


def test_infinite_verdicts():
    assert sym.is_infinite(sym.tripling_family(), 12).verdict == "infinite-suspected"
    assert sym.is_infinite(sym.chacon(), 12).verdict == "finite-suspected"
    with pytest.raises(InvalidArgument):
        sym.is_infinite(sym.chacon(), 2)


def test_periodicity():
    rep = sym.periodicity_report(sym.odometer(2), 64, 4)
    assert rep.status == "periodic-up-to-depth" and 1 in rep.periods
    rep = sym.periodicity_report(sym.chacon(), 2000, 20)
    assert rep.status == "aperiodicity-witnessed" and rep.periods == ()
    rep = sym.periodicity_report(sym.RankOneParams.constant(2, (1, 1)), 200, 3)
    assert rep.witnesses[2] == 2


def test_prime_condition():
    # Chacon: (p-1) h_n + 1 = 2 h_n + 1 = 3^(n+1)
    for n in range(6):
        assert sym.prime_condition(sym.chacon(), n, 2)
        assert sym.prime_condition(sym.chacon(), n, 5)
        assert not sym.prime_condition(sym.chacon(), n, 3)
    assert not sym.prime_condition(sym.odometer(3), 1, 2)  # 2 * 3 = 6
    with pytest.raises(InvalidArgument):
        sym.prime_condition(sym.chacon(), 1, 4)


def test_normalized_cylinder():
    nc = sym.normalized_cylinder(sym.chacon(), 1)
    assert nc.word == "0010"
    assert nc.measure == Fraction(1, 3)
    assert nc.constant == pytest.approx(sqrt(3))


def test_zeros_product():
    assert sym.zeros_product(sym.chacon(), 5) == 243
    assert sym.zeros_product(sym.tripling_family(), 10) == 1024


@pytest.mark.parametrize(
    "params, stage",
    [
        (sym.RankOneParams.constant(1, (0,)), 0),
        (sym.RankOneParams.constant(3, (0, 1)), 0),
        (sym.RankOneParams.constant(2, (0, -1)), 0),
        (sym.RankOneParams.from_table([2, 2], [(0, 0), (0, 1)]), 2),
    ],
)
def test_invalid_parameters_report_stage(params, stage):
    with pytest.raises(InvalidParameters) as err:
        sym.build_blocks(params, 4)
    assert err.value.stage == stage


def test_bad_words():
    with pytest.raises(InvalidArgument):
        sym.occurrence_count("", "0101")
    with pytest.raises(InvalidArgument):
        sym.occurrence_count("2", "0101")


params_strategy = st.builds(
    lambda p, rows: sym.RankOneParams.from_table([len(r) for r in rows], rows),
    st.just(None),
    st.lists(st.lists(st.integers(0, 3), min_size=2, max_size=4), min_size=6, max_size=6),
)


@settings(max_examples=60, deadline=None)
@given(params_strategy, st.text("01", min_size=1, max_size=4))
def test_counts_match_string_search(params, v):
    stages = 5
    blocks = sym.build_blocks(params, stages)
    counts = sym.occurrence_counts(params, v, stages)
    assert counts == [len(naive_positions(v, b.word)) for b in blocks]
    assert counts == [sym.occurrence_count(v, b.word) for b in blocks]
    assert sym.occurrence_positions(v, blocks[-1].word).tolist() == naive_positions(v, blocks[-1].word)


@settings(max_examples=40, deadline=None)
@given(params_strategy)
def test_blocks_nest_and_count(params):
    blocks = sym.build_blocks(params, 5)
    for a, b in zip(blocks, blocks[1:]):
        assert b.word.startswith(a.word)
        assert b.word.count("0") == b.zeros


def test_counts_beyond_length_cap_are_exact():
    # monoid counts at stage 16 (h = 21523360 > cap) against stage-wise recursion
    params = sym.chacon()
    counts = sym.occurrence_counts(params, "11", 16)
    assert counts[0] == 0
    # "11" never occurs in Chacon words: every spacer run has length 1 and
    # W_n starts and ends with 0
    assert set(counts) == {0}
    c10 = sym.occurrence_counts(params, "10", 16)
    # each "1" is followed by a "0", so #10 = #1 = h_n - 3^n
    assert c10 == [b.ones for b in sym.build_blocks(params, 16, length_cap=100)]
