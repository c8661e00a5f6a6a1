"""Multiple choice problem with interval multiset estimates.

Pick exactly one item from every group, keep the total cost within the budget,
and make the generalized median of the picked estimates as good as possible.

The median order is only partial, so the search keeps every feasible selection
whose median is not beaten and then narrows the field in stages:

1. median (poset order; incomparable medians stay together),
2. integrated estimate of the selection (poset order),
3. smaller total deviation from the median,
4. larger total cost (among estimate-equivalent plans, the one that spends the
   budget).

Whatever survives is returned, sorted by item ids.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import EmptyGroup, Infeasible, ScaleMismatch, SchemaError
from .estimates import (
    Dominance,
    MultisetEstimate,
    Scale,
    dominates,
    enumerate_scale,
    generalized_median,
    integrate,
    make_estimate,
    representative,
)

__all__ = [
    "ChoiceItem",
    "ChoiceInstance",
    "ChoiceSolution",
    "solve",
    "rank_selection",
    "evaluate",
    "parse_instance",
    "load_instance",
]

# float budgets: tolerate accumulated rounding in cost sums
_COST_EPS = 1e-9


@dataclass(frozen=True)
class ChoiceItem:
    id: str
    estimate: MultisetEstimate
    cost: float = 0
    group: int = 0
    index: int = 0


@dataclass(frozen=True)
class ChoiceInstance:
    groups: tuple[tuple[ChoiceItem, ...], ...]
    budget: float
    scale: Scale

    def __post_init__(self):
        groups = []
        for i, g in enumerate(self.groups):
            g = tuple(g)
            if not g:
                raise EmptyGroup(f"group {i + 1} has no items")
            fixed = []
            for j, item in enumerate(g):
                e = item.estimate
                if e.l != self.scale.l or e.eta != self.scale.eta:
                    raise ScaleMismatch(f"item {item.id!r}: {e} is not an estimate of {self.scale}")
                if item.cost < 0:
                    raise SchemaError(f"item {item.id!r}: negative cost {item.cost}")
                fixed.append(ChoiceItem(item.id, e, item.cost, i + 1, j + 1))
            groups.append(tuple(fixed))
        object.__setattr__(self, "groups", tuple(groups))
        if self.budget < 0:
            raise SchemaError(f"budget must be non-negative, got {self.budget}")

    @classmethod
    def build(cls, groups: Iterable[Iterable[ChoiceItem]], budget: float, scale: Scale | None = None) -> ChoiceInstance:
        groups = [tuple(g) for g in groups]
        if scale is None:
            first = next((g[0] for g in groups if g), None)
            if first is None:
                raise EmptyGroup("instance has no items")
            scale = first.estimate.scale
        return cls(tuple(groups), budget, scale)

    @property
    def size(self) -> int:
        n = 1
        for g in self.groups:
            n *= len(g)
        return n


@dataclass(frozen=True)
class ChoiceSolution:
    selection: tuple[ChoiceItem, ...]
    total_cost: float
    median: MultisetEstimate
    median_ties: tuple[MultisetEstimate, ...]
    deviation: int
    integrated: MultisetEstimate

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(item.id for item in self.selection)

    def to_dict(self) -> dict[str, Any]:
        return {
            "selection": list(self.ids),
            "total_cost": self.total_cost,
            "median": str(self.median),
            "median_ties": [str(t) for t in self.median_ties],
            "deviation": self.deviation,
            "integrated": str(self.integrated),
        }


def evaluate(selection: Sequence[ChoiceItem], scale: Scale) -> ChoiceSolution:
    """Score one selection directly (no search)."""
    med = generalized_median([i.estimate for i in selection], scale)
    return ChoiceSolution(
        selection=tuple(selection),
        total_cost=sum(i.cost for i in selection),
        median=med.best,
        median_ties=med.ties,
        deviation=med.deviation,
        integrated=integrate([i.estimate for i in selection]),
    )


def _poset_cmp(a: MultisetEstimate, b: MultisetEstimate) -> int:
    rel = dominates(a, b)
    if rel is Dominance.BETTER:
        return -1
    if rel is Dominance.WORSE:
        return 1
    return 0


def rank_selection(a: ChoiceSolution, b: ChoiceSolution) -> int:
    """Pairwise comparison along the ranking chain; negative means ``a`` ranks first.

    Poset-incomparable estimates count as equal at their key. The final key
    (item ids) makes the comparison decisive between distinct selections.
    """
    for key in (
        _poset_cmp(a.median, b.median),
        _poset_cmp(a.integrated, b.integrated),
        (a.deviation > b.deviation) - (a.deviation < b.deviation),
        (a.total_cost < b.total_cost) - (a.total_cost > b.total_cost),
        (a.ids > b.ids) - (a.ids < b.ids),
    ):
        if key:
            return key
    return 0


def _maximal(values: Iterable[tuple[int, ...]]) -> set:
    """Profiles not strictly dominated by another in the collection."""
    vals = list(set(values))
    out = set()
    for v in vals:
        if not any(o != v and all(x >= y for x, y in zip(o, v)) for o in vals):
            out.add(v)
    return out


class _Search:
    """Exact depth-first enumeration with incremental median bookkeeping."""

    def __init__(self, instance: ChoiceInstance):
        self.instance = instance
        self.cands = enumerate_scale(instance.scale)
        profiles = [c.profile for c in self.cands]
        n = len(self.cands)
        # better[i][j]: candidate i strictly dominates candidate j
        self.better = [
            [i != j and all(x >= y for x, y in zip(profiles[i], profiles[j])) for j in range(n)]
            for i in range(n)
        ]
        self.rows = [
            [
                tuple(sum(abs(x - y) for x, y in zip(p, item.estimate.profile)) for p in profiles)
                for item in g
            ]
            for g in instance.groups
        ]
        mins = [min(i.cost for i in g) for g in instance.groups]
        self.tail_min = [0.0] * (len(mins) + 1)
        for k in range(len(mins) - 1, -1, -1):
            self.tail_min[k] = self.tail_min[k + 1] + mins[k]
        self._rep_cache: dict[tuple[int, ...], int] = {}

    def _rep(self, ties: tuple[int, ...]) -> int:
        hit = self._rep_cache.get(ties)
        if hit is None:
            rep = representative([self.cands[i] for i in ties])
            hit = self.cands.index(rep)
            self._rep_cache[ties] = hit
        return hit

    def run(self) -> list[tuple]:
        groups = self.instance.groups
        budget = self.instance.budget + _COST_EPS * max(1.0, abs(self.instance.budget))
        if self.tail_min[0] > budget:
            raise Infeasible(
                f"cheapest selection costs {self.tail_min[0]:g}, over the budget {self.instance.budget:g}"
            )
        m = len(groups)
        l = self.instance.scale.l
        # stage-1 pool: records grouped by representative median, only non-dominated medians kept
        pool: dict[int, list[tuple]] = {}
        picks: list[int] = [0] * m

        def rec(depth: int, cost: float, acc: tuple[int, ...], counts: tuple[int, ...]):
            if depth == m:
                dev = min(acc)
                ties = tuple(i for i, v in enumerate(acc) if v == dev)
                rep = self._rep(ties)
                if rep not in pool:
                    if any(self.better[o][rep] for o in pool):
                        return
                    for o in [o for o in pool if self.better[rep][o]]:
                        del pool[o]
                    pool[rep] = []
                pool[rep].append((tuple(picks), cost, counts, dev, ties, rep))
                return
            rest = self.tail_min[depth + 1]
            for j, item in enumerate(groups[depth]):
                c = cost + item.cost
                if c + rest > budget:
                    continue
                picks[depth] = j
                row = self.rows[depth][j]
                rec(
                    depth + 1,
                    c,
                    tuple(a + b for a, b in zip(acc, row)),
                    tuple(a + b for a, b in zip(counts, item.estimate.counts)),
                )

        rec(0, 0.0, (0,) * len(self.cands), (0,) * l)
        return [r for recs in pool.values() for r in recs]


def _profile(counts: tuple[int, ...]) -> tuple[int, ...]:
    out, t = [], 0
    for c in counts[:-1]:
        t += c
        out.append(t)
    return tuple(out)


def solve(instance: ChoiceInstance) -> list[ChoiceSolution]:
    """All top-ranked feasible selections, best first."""
    search = _Search(instance)
    records = search.run()

    # stage 2: integrated estimate, poset-maximal
    top = _maximal(_profile(r[2]) for r in records)
    records = [r for r in records if _profile(r[2]) in top]
    # stage 3: deviation
    dev = min(r[3] for r in records)
    records = [r for r in records if r[3] == dev]
    # stage 4: cost, larger first
    cost = max(r[1] for r in records)
    records = [r for r in records if r[1] >= cost - _COST_EPS * max(1.0, abs(cost))]

    out = []
    for picks, cost, counts, dev, ties, rep in records:
        sel = tuple(g[j] for g, j in zip(instance.groups, picks))
        out.append(ChoiceSolution(
            selection=sel,
            total_cost=sum(i.cost for i in sel),
            median=search.cands[rep],
            median_ties=tuple(search.cands[i] for i in ties),
            deviation=dev,
            integrated=MultisetEstimate(counts),
        ))
    out.sort(key=functools.cmp_to_key(rank_selection))
    return out


def _item_from(raw: Mapping, scale: Scale, where: str) -> ChoiceItem:
    for key in ("id", "estimate"):
        if key not in raw:
            raise SchemaError(f"{where}: missing field {key!r}")
    cost = raw.get("cost", 0)
    if isinstance(cost, bool) or not isinstance(cost, (int, float)):
        raise SchemaError(f"{where}: cost must be a number")
    return ChoiceItem(str(raw["id"]), make_estimate(scale, raw["estimate"]), cost)


def parse_instance(document: str | Mapping[str, Any]) -> ChoiceInstance:
    """``{scale: {l, eta}, budget, groups: [[{id, estimate, cost}, ...], ...]}``"""
    if isinstance(document, str):
        document = json.loads(document)
    for key in ("scale", "budget", "groups"):
        if key not in document:
            raise SchemaError(f"choice instance: missing field {key!r}")
    raw_scale = document["scale"]
    scale = Scale.parse(raw_scale) if isinstance(raw_scale, str) else Scale(raw_scale["l"], raw_scale["eta"])
    groups = []
    for i, g in enumerate(document["groups"]):
        groups.append(tuple(_item_from(raw, scale, f"group {i + 1}") for raw in g))
    return ChoiceInstance(tuple(groups), document["budget"], scale)


def load_instance(path: str | Path) -> ChoiceInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))
