"""Bottlenecks of a composite solution and budgeted improvement planning."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .choice import ChoiceInstance, ChoiceItem, ChoiceSolution, solve
from .errors import SchemaError, UnknownTarget
from .estimates import MultisetEstimate, generalized_median, make_estimate, proximity
from .model import MorphModel, load_builtin_json
from .synthesis import CompositeSolution, score

__all__ = [
    "Bottleneck",
    "ImprovementAction",
    "ImprovementPlan",
    "find_bottlenecks",
    "plan_improvement",
    "parse_actions",
    "load_actions",
    "builtin_actions",
]


@dataclass(frozen=True)
class Bottleneck:
    kind: str  # "element" or "compatibility"
    subject: tuple[str, ...]  # one DA id, or a DA pair
    current: MultisetEstimate | int
    proposed: MultisetEstimate | int

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "subject": list(self.subject),
            "current": str(self.current),
            "proposed": str(self.proposed),
        }


@dataclass(frozen=True)
class ImprovementAction:
    id: str
    target: str
    new_estimate: MultisetEstimate
    cost: float = 0


@dataclass(frozen=True)
class ImprovementPlan:
    before: CompositeSolution
    after: CompositeSolution
    choice: ChoiceSolution
    applied: tuple[ImprovementAction, ...]  # one per selected DA, including "none" picks
    ties: tuple[ChoiceSolution, ...] = ()

    @property
    def action_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.applied)

    def to_dict(self) -> dict[str, Any]:
        return {
            "before": {"selection": dict(self.before.selection), "w": self.before.w, "e": str(self.before.e)},
            "after": {
                "selection": dict(self.after.selection),
                "w": self.after.w,
                "e": str(self.after.e),
                "e_ties": [str(t) for t in self.after.e_ties],
                "deviation": self.after.deviation,
            },
            "actions": list(self.action_ids),
            "total_cost": self.choice.total_cost,
            "tied_plans": [list(t.ids) for t in self.ties],
        }


def _estimates_of(solution: CompositeSolution, model: MorphModel,
                  estimates: Mapping[str, MultisetEstimate] | None) -> dict[str, MultisetEstimate]:
    out = {}
    for da in solution.selection.values():
        if estimates is not None and da in estimates:
            out[da] = estimates[da]
        else:
            out[da] = model.estimate(da)
    return out


def find_bottlenecks(solution: CompositeSolution, model: MorphModel,
                     estimates: Mapping[str, MultisetEstimate] | None = None) -> list[Bottleneck]:
    """Non-ideal selected DAs, then cross-part pairs below ``nu``; worst first in each kind."""
    ideal = model.scale.ideal()
    ests = _estimates_of(solution, model, estimates)
    picks = list(solution.selection.values())

    elements = [
        (abs(proximity(ests[da], ideal)), i, Bottleneck("element", (da,), ests[da], ideal))
        for i, da in enumerate(picks)
        if ests[da] != ideal
    ]
    elements.sort(key=lambda t: (-t[0], t[1]))

    pairs = []
    for n, (a, b) in enumerate(combinations(picks, 2)):
        w = model.compat(a, b)
        if w < model.nu:
            pairs.append((w, n, Bottleneck("compatibility", (a, b), w, model.nu)))
    pairs.sort(key=lambda t: (t[0], t[1]))

    return [t[2] for t in elements] + [t[2] for t in pairs]


def plan_improvement(solution: CompositeSolution, actions: Mapping[str, Sequence[ImprovementAction]] | Iterable[ImprovementAction],
                     budget: float, model: MorphModel,
                     estimates: Mapping[str, MultisetEstimate] | None = None) -> ImprovementPlan:
    """Choose one action per selected DA under the budget, maximising the new median.

    Each action group should contain a zero-cost action that keeps the current
    estimate; DAs with no group keep theirs. Compatibility is left untouched.
    """
    if not isinstance(actions, Mapping):
        grouped: dict[str, list[ImprovementAction]] = {}
        for a in actions:
            grouped.setdefault(a.target, []).append(a)
        actions = grouped
    ests = _estimates_of(solution, model, estimates)
    picks = list(solution.selection.values())
    unknown = [t for t in actions if t not in ests]
    if unknown:
        raise UnknownTarget(f"action targets {unknown} are not part of {solution.id}")

    by_item: dict[str, ImprovementAction] = {}
    groups = []
    for da in picks:
        acts = list(actions.get(da, ()))
        if not acts:
            acts = [ImprovementAction(f"{da}:keep", da, ests[da], 0)]
        items = []
        for a in acts:
            if a.target != da:
                raise UnknownTarget(f"action {a.id!r} targets {a.target!r}, listed under {da!r}")
            by_item[a.id] = a
            items.append(ChoiceItem(a.id, a.new_estimate, a.cost))
        groups.append(tuple(items))

    ranked = solve(ChoiceInstance(tuple(groups), budget, model.scale))
    best = ranked[0]
    applied = tuple(by_item[i] for i in best.ids)

    new_ests = [a.new_estimate for a in applied]
    med = generalized_median(new_ests, model.scale)
    selection = {}
    for (part, da), act in zip(solution.selection.items(), applied):
        changed = act.new_estimate != ests[da] or act.cost
        selection[part] = f"{da}[{act.id}]" if changed else da
    after = CompositeSolution(
        component=solution.component,
        selection=selection,
        w=solution.w,
        e=med.best,
        e_ties=med.ties,
        deviation=med.deviation,
        leaves=dict(solution.leaves),
    )
    return ImprovementPlan(solution, after, best, applied, tuple(ranked[1:]))


def parse_actions(document: str | Mapping[str, Any], model: MorphModel):
    """Decode an actions file.

    Returns ``(solution, actions_by_target, budget)``; ``budget`` may be None.
    """
    if isinstance(document, str):
        document = json.loads(document)
    for key in ("solution_ref", "groups"):
        if key not in document:
            raise SchemaError(f"actions file: missing field {key!r}")
    ref = document["solution_ref"]
    if not isinstance(ref, Mapping) or "selection" not in ref:
        raise SchemaError("solution_ref must be an object with a 'selection' map")
    solution = score(dict(ref["selection"]), model, component=ref.get("component"))
    grouped: dict[str, list[ImprovementAction]] = {}
    for g in document["groups"]:
        if "target" not in g or "actions" not in g:
            raise SchemaError("each action group needs 'target' and 'actions'")
        target = g["target"]
        for raw in g["actions"]:
            if "id" not in raw or "estimate" not in raw:
                raise SchemaError(f"action under {target!r} needs 'id' and 'estimate'")
            grouped.setdefault(target, []).append(
                ImprovementAction(str(raw["id"]), target, make_estimate(model.scale, raw["estimate"]), raw.get("cost", 0))
            )
    return solution, grouped, document.get("budget")


def load_actions(path: str | Path, model: MorphModel):
    return parse_actions(Path(path).read_text(encoding="utf-8"), model)


def builtin_actions(model: MorphModel):
    """Improvement actions for ``H3*C1*W2`` on the bundled dataset."""
    return parse_actions(load_builtin_json("improvement_f2.json"), model)
