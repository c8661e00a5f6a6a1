"""Hierarchical morphological composition.

A composite solution picks one design alternative (DA) per part of a composite
component. Its quality is the pair ``N(S) = (w; e)``: ``w`` is the weakest
pairwise compatibility inside the selection and ``e`` is the generalized median
of the selected DAs' estimates. Admissible solutions have ``w >= 1``; the kept
ones are those not dominated under the product order on ``(w, e)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import EmptyAlternatives, IncompleteSelection
from .estimates import (
    Dominance,
    MultisetEstimate,
    dominates,
    enumerate_scale,
    generalized_median,
)
from .model import DesignAlternative, MorphModel

__all__ = [
    "CompositeSolution",
    "ParetoFront",
    "compatibility_floor",
    "score",
    "n_dominates",
    "pareto_filter",
    "synthesize_component",
    "bottom_up",
    "composite_id",
]

Alternatives = Mapping[str, Sequence[DesignAlternative]]


@dataclass(frozen=True, eq=False)
class CompositeSolution:
    component: str
    selection: Mapping[str, str]  # part id -> DA id, in part order
    w: int
    e: MultisetEstimate
    e_ties: tuple[MultisetEstimate, ...]
    deviation: int
    leaves: Mapping[str, str] = field(default_factory=dict)  # leaf component -> leaf DA

    @property
    def id(self) -> str:
        return composite_id(self.selection.values())

    def as_alternative(self) -> DesignAlternative:
        return DesignAlternative(self.id, self.component, self.e, parts=dict(self.leaves))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CompositeSolution):
            return NotImplemented
        return (self.component, dict(self.selection), self.w, self.e, self.e_ties, self.deviation) == (
            other.component, dict(other.selection), other.w, other.e, other.e_ties, other.deviation
        )

    def __hash__(self):
        return hash((self.component, tuple(self.selection.items())))

    def to_dict(self) -> dict:
        return {
            "selection": dict(self.selection),
            "w": self.w,
            "e": str(self.e),
            "e_ties": [str(t) for t in self.e_ties],
            "deviation": self.deviation,
        }


@dataclass(frozen=True)
class ParetoFront:
    component: str
    solutions: tuple[CompositeSolution, ...]

    def __iter__(self) -> Iterator[CompositeSolution]:
        return iter(self.solutions)

    def __len__(self) -> int:
        return len(self.solutions)

    def __getitem__(self, i) -> CompositeSolution:
        return self.solutions[i]

    def find(self, selection: Mapping[str, str]) -> CompositeSolution | None:
        want = dict(selection)
        for s in self.solutions:
            if dict(s.selection) == want:
                return s
        return None

    def alternatives(self) -> list[DesignAlternative]:
        return [s.as_alternative() for s in self.solutions]

    def to_dict(self) -> dict:
        return {"component": self.component, "solutions": [s.to_dict() for s in self.solutions]}


def composite_id(da_ids: Iterable[str]) -> str:
    """``X2*Y2*Z2``; nested composite ids are parenthesised."""
    return "*".join(f"({d})" if "*" in d else d for d in da_ids)


def _composite_for(selection: Mapping[str, str], model: MorphModel) -> str:
    parts = set(selection)
    for comp in model.components.values():
        if comp.children and set(comp.children) == parts:
            return comp.id
    raise IncompleteSelection(f"no composite has exactly the parts {sorted(parts)}")


def compatibility_floor(selection: Mapping[str, str], model: MorphModel, component: str | None = None) -> int:
    """Minimum compatibility over all cross-part pairs of the selection.

    A single-part selection has no pairs and gets ``nu``.
    """
    if component is not None:
        _check_complete(selection, model, component)
    picks = list(selection.values())
    if len(picks) < 2:
        return model.nu
    return min(model.compat(a, b) for a, b in combinations(picks, 2))


def _check_complete(selection: Mapping[str, str], model: MorphModel, component: str) -> None:
    parts = model.component(component).children
    missing = [p for p in parts if p not in selection]
    extra = [p for p in selection if p not in parts]
    if missing or extra:
        raise IncompleteSelection(
            f"selection for {component!r} must cover {list(parts)}; missing {missing}, unexpected {extra}"
        )


def _catalog(model: MorphModel, component: str, alternatives: Alternatives | None) -> dict[str, list[DesignAlternative]]:
    comp = model.component(component)
    out = {}
    for part in comp.children:
        if alternatives is not None and part in alternatives:
            alts = list(alternatives[part])
        else:
            alts = list(model.component(part).alternatives)
        if not alts:
            raise EmptyAlternatives(f"part {part!r} of {component!r} has no design alternatives")
        out[part] = alts
    return out


def _score(component: str, picks: Sequence[DesignAlternative], parts: Sequence[str], w: int, model: MorphModel) -> CompositeSolution:
    med = generalized_median([a.estimate for a in picks], model.scale)
    leaves: dict[str, str] = {}
    for a in picks:
        leaves.update(a.leaves)
    return CompositeSolution(
        component=component,
        selection={p: a.id for p, a in zip(parts, picks)},
        w=w,
        e=med.best,
        e_ties=med.ties,
        deviation=med.deviation,
        leaves=leaves,
    )


def score(selection: Mapping[str, str], model: MorphModel, alternatives: Alternatives | None = None,
          component: str | None = None) -> CompositeSolution:
    """Evaluate ``N(S)`` for one complete selection."""
    component = component or _composite_for(selection, model)
    _check_complete(selection, model, component)
    catalog = _catalog(model, component, alternatives)
    parts = model.component(component).children
    picks = []
    for p in parts:
        by_id = {a.id: a for a in catalog[p]}
        if selection[p] not in by_id:
            raise IncompleteSelection(f"{selection[p]!r} is not an alternative of part {p!r}")
        picks.append(by_id[selection[p]])
    w = compatibility_floor({p: a.id for p, a in zip(parts, picks)}, model)
    return _score(component, picks, parts, w, model)


def n_dominates(a: CompositeSolution, b: CompositeSolution) -> bool:
    """Strict dominance under the product order on ``(w, e)``."""
    rel = dominates(a.e, b.e)
    if a.w < b.w or rel in (Dominance.WORSE, Dominance.INCOMPARABLE):
        return False
    return a.w > b.w or rel is Dominance.BETTER


def _front_order(model: MorphModel):
    rank = {e: i for i, e in enumerate(enumerate_scale(model.scale))}

    def key(s: CompositeSolution):
        return (-s.w, rank.get(s.e, len(rank)), s.deviation, tuple(s.selection.values()))
    return key


def pareto_filter(solutions: Iterable[CompositeSolution], model: MorphModel | None = None) -> ParetoFront:
    """Keep exactly the non-dominated solutions; output order is canonical."""
    sols = list(solutions)
    kept = [s for s in sols if not any(n_dominates(o, s) for o in sols)]
    if model is not None:
        kept.sort(key=_front_order(model))
    else:
        kept.sort(key=lambda s: (-s.w, tuple(-x for x in s.e.profile), s.deviation, tuple(s.selection.values())))
    component = kept[0].component if kept else ""
    return ParetoFront(component, tuple(kept))


def _enumerate(model: MorphModel, parts: Sequence[str], catalog: Mapping[str, Sequence[DesignAlternative]]):
    # depth-first with a running compatibility floor; branches at floor 0 are dropped
    picks: list[DesignAlternative] = []

    def rec(depth: int, floor: int):
        if depth == len(parts):
            yield list(picks), floor
            return
        for alt in catalog[parts[depth]]:
            f = floor
            for prev in picks:
                f = min(f, model.compat(prev.id, alt.id))
                if f < 1:
                    break
            if f < 1:
                continue
            picks.append(alt)
            yield from rec(depth + 1, f)
            picks.pop()

    yield from rec(0, model.nu)


def synthesize_component(model: MorphModel, component: str, alternatives: Alternatives | None = None) -> ParetoFront:
    """Pareto front of admissible (``w >= 1``) selections for one composite."""
    comp = model.component(component)
    if comp.is_leaf:
        raise IncompleteSelection(f"{component!r} is a leaf; nothing to compose")
    catalog = _catalog(model, component, alternatives)
    scored = [_score(component, picks, comp.children, w, model)
              for picks, w in _enumerate(model, comp.children, catalog)]
    front = pareto_filter(scored, model)
    return ParetoFront(component, front.solutions)


def bottom_up(model: MorphModel) -> dict[str, ParetoFront]:
    """Synthesize every composite from the leaves up; the root front comes last."""
    fronts: dict[str, ParetoFront] = {}
    derived: dict[str, list[DesignAlternative]] = {}
    for comp in model.composites():
        front = synthesize_component(model, comp.id, derived)
        fronts[comp.id] = front
        derived[comp.id] = front.alternatives()
    return fronts
