import json

import pytest

from morphsynth.errors import Infeasible, SchemaError, UnknownTarget
from morphsynth.estimates import MultisetEstimate
from morphsynth.improvement import (
    ImprovementAction,
    builtin_actions,
    find_bottlenecks,
    parse_actions,
    plan_improvement,
)
from morphsynth.model import builtin_dataset, parse_model
from morphsynth.synthesis import score


def E(*c):
    return MultisetEstimate(c)


@pytest.fixture(scope="module")
def model():
    return builtin_dataset()


def test_bottlenecks_of_h2_c1_w2(model):
    sol = score({"H": "H2", "C": "C1", "W": "W2"}, model, component="F")
    found = find_bottlenecks(sol, model)
    elements = [b for b in found if b.kind == "element"]
    pairs = [b for b in found if b.kind == "compatibility"]
    assert {b.subject[0] for b in elements} == {"H2", "C1", "W2"}
    assert all(b.current == E(2, 1, 0, 0) and b.proposed == E(3, 0, 0, 0) for b in elements)
    # weakest pair first
    assert pairs[0].subject == ("H2", "C1") and pairs[0].current == 1 and pairs[0].proposed == model.nu
    assert found.index(elements[-1]) < found.index(pairs[0])


def test_bottlenecks_of_h3_c1_w2(model):
    sol, _, _ = builtin_actions(model)
    found = find_bottlenecks(sol, model)
    assert found[0].subject == ("H3",) and found[0].current == E(0, 2, 1, 0)
    assert [b.subject for b in found if b.kind == "compatibility"] == [("H3", "W2"), ("C1", "W2")]


def test_no_bottlenecks_on_an_ideal_solution():
    doc = {
        "scale": {"l": 3, "eta": 2}, "nu": 2,
        "components": [{"id": "S", "children": ["P", "R"]},
                       {"id": "P", "alternatives": [{"id": "P1", "estimate": [2, 0, 0]}]},
                       {"id": "R", "alternatives": [{"id": "R1", "estimate": [2, 0, 0]}]}],
        "compatibility": [{"a": "P1", "b": "R1", "w": 2}],
    }
    m = parse_model(doc)
    assert find_bottlenecks(score({"P": "P1", "R": "R1"}, m, component="S"), m) == []


def test_zero_budget_keeps_everything(model):
    sol, actions, _ = builtin_actions(model)
    plan = plan_improvement(sol, actions, 0, model)
    assert set(plan.action_ids) == {"y11", "y21", "y31"}
    assert plan.after.e == sol.e and plan.choice.total_cost == 0
    assert plan.after.id == sol.id


def test_plan_labels_changed_alternatives(model):
    sol, actions, _ = builtin_actions(model)
    plan = plan_improvement(sol, actions, 45, model)
    assert plan.after.id == "H3[y34]*C1[y22]*W2[y12]"
    assert plan.after.w == sol.w
    assert plan.to_dict()["total_cost"] == 45


def test_parts_without_actions_keep_their_estimate(model):
    sol, actions, _ = builtin_actions(model)
    only_h = {"H3": actions["H3"]}
    plan = plan_improvement(sol, only_h, 1, model)
    assert "C1:keep" in plan.action_ids and "W2:keep" in plan.action_ids
    assert plan.after.e == E(2, 1, 0, 0)


def test_unknown_target(model):
    sol, _, _ = builtin_actions(model)
    with pytest.raises(UnknownTarget):
        plan_improvement(sol, [ImprovementAction("z", "X1", E(3, 0, 0, 0), 0)], 5, model)
    with pytest.raises(UnknownTarget):
        plan_improvement(sol, {"H3": [ImprovementAction("z", "C1", E(3, 0, 0, 0), 0)]}, 5, model)


def test_infeasible_without_a_free_action(model):
    sol, _, _ = builtin_actions(model)
    with pytest.raises(Infeasible):
        plan_improvement(sol, [ImprovementAction("pricey", "H3", E(3, 0, 0, 0), 10)], 5, model)


def test_parse_actions_errors(model):
    with pytest.raises(SchemaError):
        parse_actions(json.dumps({"groups": []}), model)
    with pytest.raises(SchemaError):
        parse_actions({"solution_ref": {"selection": {"H": "H3", "C": "C1", "W": "W2"}},
                       "groups": [{"target": "H3", "actions": [{"id": "a"}]}]}, model)
