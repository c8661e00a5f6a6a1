import pytest
from hypothesis import given, settings, strategies as st

from morphsynth.errors import CardinalityMismatch, EmptyInput, EstimateError, ScaleMismatch, WrongLength
from morphsynth.estimates import (
    Dominance,
    MultisetEstimate,
    Scale,
    dominates,
    enumerate_scale,
    generalized_median,
    hasse_edges,
    integrate,
    interval_count,
    make_estimate,
    multiset_coefficient,
    parse_estimate,
    parse_estimates,
    proximity,
    representative,
    set_median,
)

from oracles import brute_median, interval_multisets

P43 = Scale(4, 3)
P43_ORDER = ["(3,0,0,0)", "(2,1,0,0)", "(1,2,0,0)", "(1,1,1,0)", "(0,3,0,0)", "(0,2,1,0)",
             "(0,1,2,0)", "(0,1,1,1)", "(0,0,3,0)", "(0,0,2,1)", "(0,0,1,2)", "(0,0,0,3)"]


def E(*c):
    return MultisetEstimate(c)


def estimates_of(scale):
    return st.sampled_from(enumerate_scale(scale))


def test_enumeration_order_is_best_first():
    assert [str(e) for e in enumerate_scale(P43)] == P43_ORDER
    assert enumerate_scale(P43)[0] == P43.ideal()
    assert enumerate_scale(P43)[-1] == P43.worst()


@pytest.mark.parametrize("l,eta", [(3, 2), (4, 3), (5, 4), (6, 5), (7, 3), (2, 6)])
def test_scale_size_matches_oracle_and_closed_form(l, eta):
    n = len(enumerate_scale(Scale(l, eta)))
    assert n == len(interval_multisets(l, eta)) == interval_count(l, eta)


def test_known_counts():
    # brute-force filter of all 252 multisets by contiguous support
    assert len(enumerate_scale(Scale(6, 5))) == len(interval_multisets(6, 5)) == 64
    assert multiset_coefficient(6, 5) == 252
    assert multiset_coefficient(4, 3) == 20


def test_multiset_coefficient_is_exact_for_large_arguments():
    assert multiset_coefficient(200, 300) > 2 ** 64


def test_scale_parse_and_str():
    assert Scale.parse("4,3") == Scale.parse("P4,3") == P43
    assert str(P43) == "P4,3"


@pytest.mark.parametrize("counts,error", [
    ((2, 1, 0), WrongLength),
    ((2, 2, 0, 0), CardinalityMismatch),
    ((3, -1, 1, 0), EstimateError),
])
def test_make_estimate_rejects_bad_counts(counts, error):
    with pytest.raises(error):
        make_estimate(P43, counts)


def test_parse_estimate():
    assert parse_estimate("(2,1,0,0)", P43) == E(2, 1, 0, 0)
    assert parse_estimates("(2,1,0,0);(0,2,1,0)") == [E(2, 1, 0, 0), E(0, 2, 1, 0)]
    with pytest.raises(EstimateError):
        parse_estimate("2,1,0,0")
    with pytest.raises(EmptyInput):
        parse_estimates(" ; ")


def test_interval_flag():
    assert E(1, 1, 1, 0).is_interval
    assert not E(1, 0, 1, 1).is_interval


def test_dominance_examples():
    assert dominates(E(3, 0, 0, 0), E(2, 1, 0, 0)) is Dominance.BETTER
    assert dominates(E(0, 2, 1, 0), E(1, 2, 0, 0)) is Dominance.WORSE
    assert dominates(E(0, 3, 0, 0), E(1, 1, 1, 0)) is Dominance.INCOMPARABLE
    assert dominates(E(0, 3, 0, 0), E(0, 3, 0, 0)) is Dominance.EQUAL
    with pytest.raises(ScaleMismatch):
        dominates(E(3, 0, 0, 0), E(2, 1, 0))


def test_hasse_edges_cover_relation():
    edges = hasse_edges(enumerate_scale(P43))
    pairs = {(str(a), str(b)) for a, b in edges}
    assert ("(3,0,0,0)", "(2,1,0,0)") in pairs
    assert ("(3,0,0,0)", "(1,2,0,0)") not in pairs  # transitive, not a cover
    assert ("(1,2,0,0)", "(1,1,1,0)") in pairs and ("(1,2,0,0)", "(0,3,0,0)") in pairs
    for a, b in edges:
        assert dominates(a, b) is Dominance.BETTER


def test_proximity_example():
    d = proximity(E(0, 2, 1, 0), E(3, 0, 0, 0))
    assert (d.minus, d.plus) == (4, 0)
    assert abs(d) == d.magnitude == 4


def test_integrate_can_leave_the_interval_set():
    s = integrate([E(3, 0, 0, 0), E(0, 0, 0, 3)])
    assert s == E(3, 0, 0, 3)
    assert not s.is_interval


def test_medians_of_a_small_set():
    ests = [E(3, 0, 0, 0), E(0, 3, 0, 0), E(0, 0, 3, 0)]
    gen = generalized_median(ests)
    ties, dev = brute_median([e.counts for e in ests], 4, 3)
    assert {t.counts for t in gen.ties} == ties and gen.deviation == dev
    sm = set_median(ests)
    assert sm.best == E(0, 3, 0, 0)
    assert gen.deviation <= sm.deviation


def test_representative_prefers_maximal_then_lexicographic():
    assert representative([E(1, 2, 0, 0), E(2, 1, 0, 0)]) == E(2, 1, 0, 0)
    assert representative([E(0, 3, 0, 0), E(1, 1, 1, 0)]) == E(1, 1, 1, 0)


def test_median_of_empty_input():
    with pytest.raises(EmptyInput):
        generalized_median([])


@given(estimates_of(P43), estimates_of(P43), estimates_of(P43))
def test_triangle_inequality_and_symmetry(a, b, c):
    assert abs(proximity(a, c)) <= abs(proximity(a, b)) + abs(proximity(b, c))
    ab, ba = proximity(a, b), proximity(b, a)
    assert (ab.minus, ab.plus) == (ba.plus, ba.minus)
    assert (abs(ab) == 0) == (a == b)


@given(st.lists(estimates_of(Scale(5, 4)), min_size=1, max_size=7))
@settings(max_examples=150)
def test_generalized_median_never_worse_than_set_median(ests):
    gen = generalized_median(ests)
    sm = set_median(ests)
    assert gen.deviation <= sm.deviation
    assert gen.best in gen.ties
    assert all(t in ests for t in sm.ties)


@given(st.lists(estimates_of(P43), min_size=1, max_size=6), st.randoms(use_true_random=False))
def test_median_is_order_independent(ests, rnd):
    shuffled = list(ests)
    rnd.shuffle(shuffled)
    assert generalized_median(ests) == generalized_median(shuffled)


@given(estimates_of(P43))
def test_median_of_a_single_estimate_is_itself(e):
    med = generalized_median([e])
    assert med.ties == (e,) and med.deviation == 0


@given(st.lists(estimates_of(P43), min_size=2, max_size=6))
def test_dominance_is_consistent_with_integration_profiles(ests):
    a, b = ests[0], ests[1]
    rel = dominates(a, b)
    inverse = {Dominance.BETTER: Dominance.WORSE, Dominance.WORSE: Dominance.BETTER}
    assert dominates(b, a) is inverse.get(rel, rel)
