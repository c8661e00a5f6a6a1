import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from morphsynth.choice import (
    ChoiceInstance,
    ChoiceItem,
    ChoiceSolution,
    evaluate,
    parse_instance,
    rank_selection,
    solve,
)
from morphsynth.errors import EmptyGroup, Infeasible, ScaleMismatch, SchemaError
from morphsynth.estimates import MultisetEstimate, Scale, enumerate_scale

from oracles import brute_choice

P43 = Scale(4, 3)
POOL = enumerate_scale(P43)


def E(*c):
    return MultisetEstimate(c)


def random_groups(rng, max_groups=4, max_items=4, max_cost=10):
    return [
        tuple(ChoiceItem(f"g{g}i{i}", rng.choice(POOL), rng.randint(0, max_cost)) for i in range(rng.randint(1, max_items)))
        for g in range(rng.randint(1, max_groups))
    ]


def as_oracle_groups(groups):
    return [[(i.id, i.estimate.counts, i.cost) for i in g] for g in groups]


def test_matches_exhaustive_oracle():
    rng = random.Random(20)
    for _ in range(60):
        groups = random_groups(rng)
        lo = sum(min(i.cost for i in g) for g in groups)
        hi = sum(max(i.cost for i in g) for g in groups)
        budget = rng.randint(lo, hi)
        got = {s.ids for s in solve(ChoiceInstance.build(groups, budget, P43))}
        assert got == brute_choice(as_oracle_groups(groups), budget, 4, 3)


def test_returned_selections_are_feasible_and_one_per_group():
    rng = random.Random(21)
    for _ in range(50):
        groups = random_groups(rng, 5, 5)
        budget = sum(max(i.cost for i in g) for g in groups) // 2 + sum(min(i.cost for i in g) for g in groups)
        for s in solve(ChoiceInstance.build(groups, budget, P43)):
            assert s.total_cost <= budget
            assert len(s.selection) == len(groups)
            assert all(item.group == k + 1 for k, item in enumerate(s.selection))


def test_group_permutation_does_not_change_the_answer():
    rng = random.Random(22)
    for _ in range(40):
        groups = random_groups(rng, 4, 3)
        budget = sum(max(i.cost for i in g) for g in groups)
        base = {(frozenset(s.ids), s.median) for s in solve(ChoiceInstance.build(groups, budget, P43))}
        perm = groups[:]
        rng.shuffle(perm)
        again = {(frozenset(s.ids), s.median) for s in solve(ChoiceInstance.build(perm, budget, P43))}
        assert base == again


def test_infeasible_and_empty_group():
    groups = [(ChoiceItem("a", E(3, 0, 0, 0), 5),), (ChoiceItem("b", E(3, 0, 0, 0), 5),)]
    with pytest.raises(Infeasible):
        solve(ChoiceInstance.build(groups, 9, P43))
    with pytest.raises(EmptyGroup):
        ChoiceInstance.build([(), groups[0]], 9, P43)
    with pytest.raises(ScaleMismatch):
        ChoiceInstance.build([(ChoiceItem("c", E(2, 1, 0), 0),)], 9, P43)
    with pytest.raises(SchemaError):
        ChoiceInstance.build(groups, -1, P43)


def test_float_costs_at_the_budget_boundary():
    groups = [(ChoiceItem("a", E(3, 0, 0, 0), 0.1),), (ChoiceItem("b", E(3, 0, 0, 0), 0.2),)]
    [s] = solve(ChoiceInstance.build(groups, 0.3, P43))
    assert s.ids == ("a", "b")


def test_incomparable_top_medians_are_all_returned():
    groups = [(ChoiceItem("p", E(0, 3, 0, 0), 0), ChoiceItem("q", E(1, 1, 1, 0), 0))]
    got = {s.ids for s in solve(ChoiceInstance.build(groups, 0, P43))}
    assert got == {("p",), ("q",)}


def test_rank_selection_keys():
    top = evaluate([ChoiceItem("a", E(3, 0, 0, 0), 9)], P43)
    low = evaluate([ChoiceItem("b", E(2, 1, 0, 0), 0)], P43)
    assert rank_selection(top, low) < 0 < rank_selection(low, top)

    # same median and integrated estimate; smaller deviation decides
    def sol(ids, dev, cost=0):
        return ChoiceSolution(tuple(ChoiceItem(i, E(2, 1, 0, 0)) for i in ids), cost,
                              E(2, 1, 0, 0), (E(2, 1, 0, 0),), dev, E(4, 2, 0, 0))
    assert rank_selection(sol("ab", 2, 0), sol("cd", 3, 50)) < 0
    # same estimates, higher total cost ranks first
    cheap = evaluate([ChoiceItem("f", E(2, 1, 0, 0), 33)], P43)
    dear = evaluate([ChoiceItem("g", E(2, 1, 0, 0), 45)], P43)
    assert rank_selection(dear, cheap) < 0
    assert rank_selection(cheap, cheap) == 0


@given(st.lists(st.tuples(st.sampled_from(POOL), st.integers(0, 9)), min_size=1, max_size=6))
@settings(max_examples=60)
def test_rank_selection_is_antisymmetric(items):
    sols = [evaluate([ChoiceItem(f"x{k}", e, c)], P43) for k, (e, c) in enumerate(items)]
    for a, b in itertools.product(sols, repeat=2):
        assert (rank_selection(a, b) > 0) == (rank_selection(b, a) < 0)


def test_parse_instance():
    doc = {
        "scale": {"l": 4, "eta": 3},
        "budget": 3,
        "groups": [[{"id": "a", "estimate": [3, 0, 0, 0], "cost": 3}, {"id": "b", "estimate": [0, 3, 0, 0]}]],
    }
    inst = parse_instance(json.dumps(doc))
    assert inst.size == 2 and inst.groups[0][1].cost == 0
    assert solve(inst)[0].ids == ("a",)
    bad = dict(doc, groups=[[{"id": "a", "estimate": [3, 0, 0, 0], "cost": "x"}]])
    with pytest.raises(SchemaError):
        parse_instance(bad)
    with pytest.raises(SchemaError):
        parse_instance({"scale": "4,3", "groups": []})
