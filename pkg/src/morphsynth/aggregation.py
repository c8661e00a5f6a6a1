"""Aggregating several solutions: supersolution, kernel, kernel extension."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .choice import ChoiceInstance, ChoiceItem, ChoiceSolution, solve
from .errors import ComponentMismatch, EmptyInput, MissingCandidate, SchemaError
from .estimates import MultisetEstimate, Scale, make_estimate, parse_estimate
from .model import load_builtin_json
from .synthesis import CompositeSolution

__all__ = [
    "Kernel",
    "Candidate",
    "KernelExtension",
    "supersolution",
    "subsolution",
    "extend_kernel",
    "parse_aggregation",
    "builtin_aggregation",
]

Selection = Mapping[str, str]


@dataclass(frozen=True)
class Kernel:
    fixed: Mapping[str, str]
    open: Mapping[str, tuple[str, ...]]
    order: tuple[str, ...] = ()  # original component order

    @property
    def components(self) -> tuple[str, ...]:
        return self.order or tuple(self.fixed) + tuple(self.open)

    def to_dict(self) -> dict[str, Any]:
        return {"fixed": dict(self.fixed), "open": {k: list(v) for k, v in self.open.items()}}


@dataclass(frozen=True)
class Candidate:
    component: str
    id: str
    estimate: MultisetEstimate
    cost: float


@dataclass(frozen=True)
class KernelExtension:
    selection: Mapping[str, str]  # kernel plus the chosen open-component DAs
    choice: ChoiceSolution

    @property
    def median(self) -> MultisetEstimate:
        return self.choice.median

    @property
    def median_ties(self) -> tuple[MultisetEstimate, ...]:
        return self.choice.median_ties

    @property
    def cost(self) -> float:
        return self.choice.total_cost

    def to_dict(self) -> dict[str, Any]:
        out = self.choice.to_dict()
        out["chosen"] = out.pop("selection")
        return {"selection": dict(self.selection), **out}


def _selections(solutions: Iterable[Selection | CompositeSolution]) -> list[dict[str, str]]:
    out = []
    for s in solutions:
        out.append(dict(s.leaves) if isinstance(s, CompositeSolution) else dict(s))
    if not out:
        raise EmptyInput("need at least one solution")
    keys = set(out[0])
    for s in out[1:]:
        if set(s) != keys:
            raise ComponentMismatch(
                f"solutions cover different components: {sorted(keys)} vs {sorted(s)}"
            )
    return out


def supersolution(solutions: Iterable[Selection | CompositeSolution]) -> dict[str, tuple[str, ...]]:
    """Per-component union of the selected DAs, in first-seen order."""
    sels = _selections(solutions)
    return {c: tuple(dict.fromkeys(s[c] for s in sels)) for c in sels[0]}


def subsolution(solutions: Iterable[Selection | CompositeSolution]) -> Kernel:
    """Components on which every solution agrees become the fixed kernel."""
    union = supersolution(solutions)
    fixed = {c: v[0] for c, v in union.items() if len(v) == 1}
    open_ = {c: v for c, v in union.items() if len(v) > 1}
    return Kernel(fixed, open_, tuple(union))


def extend_kernel(kernel: Kernel, candidates: Sequence[Candidate], budget: float,
                  scale: Scale | None = None) -> list[KernelExtension]:
    """Fill the open components through a budgeted choice problem.

    Kernel components cost nothing and do not enter the median; compatibility
    is not considered. Candidates for kernel components are ignored.
    """
    by_comp: dict[str, list[Candidate]] = {}
    for c in candidates:
        by_comp.setdefault(c.component, []).append(c)
    groups = []
    for comp in kernel.open:
        cands = by_comp.get(comp)
        if not cands:
            raise MissingCandidate(f"open component {comp!r} has no candidates")
        groups.append(tuple(ChoiceItem(c.id, c.estimate, c.cost) for c in cands))
    if not groups:
        raise MissingCandidate("kernel has no open components to extend")
    instance = ChoiceInstance.build(groups, budget, scale)
    out = []
    for sol in solve(instance):
        picked = dict(zip(kernel.open, sol.ids))
        selection = {c: kernel.fixed[c] if c in kernel.fixed else picked[c] for c in kernel.components}
        out.append(KernelExtension(selection, sol))
    return out


def parse_candidates(raw: Sequence[Mapping[str, Any]], scale: Scale | None = None) -> list[Candidate]:
    out = []
    for entry in raw:
        for key in ("component", "id", "estimate", "cost"):
            if key not in entry:
                raise SchemaError(f"candidate entry missing {key!r}: {entry}")
        est = entry["estimate"]
        if isinstance(est, str):
            e = parse_estimate(est, scale)
        elif scale is not None:
            e = make_estimate(scale, est)
        else:
            e = MultisetEstimate(tuple(est))
        out.append(Candidate(entry["component"], str(entry["id"]), e, entry["cost"]))
    return out


def parse_aggregation(document: str | Mapping[str, Any], scale: Scale | None = None):
    """``{solutions: [...], candidates: [...], budget}`` -> (selections, candidates, budget)."""
    if isinstance(document, str):
        document = json.loads(document)
    if "solutions" not in document:
        raise SchemaError("aggregation input: missing field 'solutions'")
    sols = [dict(s) for s in document["solutions"]]
    cands = parse_candidates(document.get("candidates", []), scale)
    return sols, cands, document.get("budget")


def load_aggregation(path: str | Path, scale: Scale | None = None):
    return parse_aggregation(Path(path).read_text(encoding="utf-8"), scale)


def builtin_aggregation(scale: Scale | None = None):
    """The eight system-level solutions of the bundled dataset plus the candidate table."""
    return parse_aggregation(load_builtin_json("aggregation_a.json"), scale)
