"""Morphological system model: component tree, design alternatives, compatibility.

Model files are JSON::

    {
      "scale": {"l": 4, "eta": 3},
      "nu": 4,
      "components": [
        {"id": "D", "children": ["X", "Y"]},
        {"id": "X", "alternatives": [{"id": "X1", "estimate": [0, 3, 0, 0]}, ...]},
        ...
      ],
      "compatibility": [{"a": "X1", "b": "Y1", "w": 3}, ...]
    }

``children`` entries may also be nested component objects. ``root`` is
optional; it defaults to the one component nobody lists as a child.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Any, Iterator, Mapping

from .errors import (
    DuplicateId,
    EstimateError,
    MissingCompatibility,
    SchemaError,
    UnknownReference,
)
from .estimates import MultisetEstimate, Scale, make_estimate

__all__ = [
    "DesignAlternative",
    "Component",
    "CompatibilityTable",
    "MorphModel",
    "parse_model",
    "load_model",
    "serialize_model",
    "design_space_size",
    "builtin_dataset",
    "load_builtin_json",
]


@dataclass(frozen=True)
class DesignAlternative:
    id: str
    component: str
    estimate: MultisetEstimate
    # leaf-level selection behind a synthesized (composite) alternative
    parts: Mapping[str, str] | None = field(default=None, compare=False)

    @property
    def leaves(self) -> dict[str, str]:
        if self.parts is None:
            return {self.component: self.id}
        return dict(self.parts)


@dataclass(frozen=True)
class Component:
    id: str
    children: tuple[str, ...] = ()
    alternatives: tuple[DesignAlternative, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def kind(self) -> str:
        return "leaf" if self.is_leaf else "composite"


class CompatibilityTable:
    """Symmetric ordinal compatibility ``w in [0, nu]`` keyed by unordered DA pairs."""

    def __init__(self, entries: Mapping[frozenset, int], nu: int):
        self.nu = nu
        self._entries = dict(entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, pair) -> bool:
        return frozenset(pair) in self._entries

    def get(self, a: str, b: str, default: int | None = None) -> int | None:
        return self._entries.get(frozenset((a, b)), default)

    def __call__(self, a: str, b: str) -> int:
        w = self.get(a, b)
        if w is None:
            raise UnknownReference(f"no compatibility entry for ({a}, {b})")
        return w

    def items(self):
        return self._entries.items()

    def with_entry(self, a: str, b: str, w: int) -> CompatibilityTable:
        entries = dict(self._entries)
        entries[frozenset((a, b))] = w
        return CompatibilityTable(entries, self.nu)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CompatibilityTable):
            return NotImplemented
        return self.nu == other.nu and self._entries == other._entries


@dataclass(frozen=True, eq=False)
class MorphModel:
    scale: Scale
    nu: int
    root: str
    components: Mapping[str, Component]
    compatibility: CompatibilityTable
    name: str = ""
    reference: Mapping[str, Any] | None = None
    _da_index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for comp in self.components.values():
            for da in comp.alternatives:
                self._da_index[da.id] = da

    def __eq__(self, other) -> bool:
        if not isinstance(other, MorphModel):
            return NotImplemented
        return (
            self.scale == other.scale
            and self.nu == other.nu
            and self.root == other.root
            and dict(self.components) == dict(other.components)
            and self.compatibility == other.compatibility
        )

    def component(self, cid: str) -> Component:
        try:
            return self.components[cid]
        except KeyError:
            raise UnknownReference(f"unknown component {cid!r}") from None

    def alternative(self, da_id: str) -> DesignAlternative:
        try:
            return self._da_index[da_id]
        except KeyError:
            raise UnknownReference(f"unknown design alternative {da_id!r}") from None

    def estimate(self, da_id: str) -> MultisetEstimate:
        return self.alternative(da_id).estimate

    def has_alternative(self, da_id: str) -> bool:
        return da_id in self._da_index

    def compat(self, a: str, b: str) -> int:
        """Compatibility of two DAs.

        Pairs absent from the table default to ``nu`` when either side is not a
        leaf DA of this model (e.g. synthesized composite DAs), else to 0.
        """
        w = self.compatibility.get(a, b)
        if w is not None:
            return w
        if a in self._da_index and b in self._da_index:
            return 0
        return self.nu

    def leaves(self) -> list[Component]:
        return [c for c in self.iter_postorder() if c.is_leaf]

    def composites(self) -> list[Component]:
        """Composite components, children before parents (root last)."""
        return [c for c in self.iter_postorder() if not c.is_leaf]

    def iter_postorder(self, start: str | None = None) -> Iterator[Component]:
        comp = self.component(start or self.root)
        for child in comp.children:
            yield from self.iter_postorder(child)
        yield comp

    def with_compatibility(self, a: str, b: str, w: int) -> MorphModel:
        return MorphModel(self.scale, self.nu, self.root, dict(self.components),
                          self.compatibility.with_entry(a, b, w), self.name, self.reference)

    def with_estimate(self, da_id: str, estimate: MultisetEstimate) -> MorphModel:
        da = self.alternative(da_id)
        comp = self.components[da.component]
        alts = tuple(
            DesignAlternative(a.id, a.component, estimate) if a.id == da_id else a
            for a in comp.alternatives
        )
        components = dict(self.components)
        components[comp.id] = Component(comp.id, comp.children, alts)
        return MorphModel(self.scale, self.nu, self.root, components,
                          self.compatibility, self.name, self.reference)


def _require(obj: Mapping, key: str, where: str):
    if not isinstance(obj, Mapping):
        raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    return obj[key]


def _int_field(obj: Mapping, key: str, where: str) -> int:
    value = _require(obj, key, where)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{where}: field {key!r} must be an integer")
    return value


def _flatten_components(raw: Any) -> list[dict]:
    """Accept a flat list, a nested root object, or a mix; return flat dicts."""
    if isinstance(raw, Mapping):
        raw = [raw]
    if not isinstance(raw, list):
        raise SchemaError("'components' must be a list or a nested component object")
    flat: list[dict] = []

    def visit(node):
        if not isinstance(node, Mapping):
            raise SchemaError(f"component entries must be objects, got {node!r}")
        cid = _require(node, "id", "component")
        entry = dict(node)
        if "children" in node:
            ids = []
            for child in node["children"]:
                if isinstance(child, Mapping):
                    visit(child)
                    ids.append(_require(child, "id", f"component {cid!r} child"))
                elif isinstance(child, str):
                    ids.append(child)
                else:
                    raise SchemaError(f"component {cid!r}: bad child entry {child!r}")
            entry["children"] = ids
        flat.append(entry)

    for node in raw:
        visit(node)
    return flat


def parse_model(document: str | bytes | Mapping[str, Any]) -> MorphModel:
    """Parse and fully validate a model document (JSON text or decoded object)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as err:
            raise SchemaError(f"model is not valid JSON: {err}") from None
    if not isinstance(document, Mapping):
        raise SchemaError("model document must be a JSON object")

    scale_raw = _require(document, "scale", "model")
    scale = Scale(_int_field(scale_raw, "l", "scale"), _int_field(scale_raw, "eta", "scale"))
    nu = _int_field(document, "nu", "model")
    if nu < 1:
        raise SchemaError(f"nu must be >= 1, got {nu}")

    components: dict[str, Component] = {}
    da_owner: dict[str, str] = {}
    for entry in _flatten_components(_require(document, "components", "model")):
        cid = entry["id"]
        if not isinstance(cid, str) or not cid:
            raise SchemaError(f"component id must be a non-empty string, got {cid!r}")
        if cid in components:
            raise DuplicateId(f"component {cid!r} defined twice")
        has_children = "children" in entry
        has_alts = "alternatives" in entry
        if has_children == has_alts:
            raise SchemaError(f"component {cid!r} needs exactly one of 'children' or 'alternatives'")
        if has_children:
            children = tuple(entry["children"])
            if not children:
                raise SchemaError(f"composite {cid!r} has no children")
            if len(set(children)) != len(children):
                raise DuplicateId(f"composite {cid!r} lists a child twice")
            components[cid] = Component(cid, children=children)
            continue
        alts_raw = entry["alternatives"]
        if not isinstance(alts_raw, list) or not alts_raw:
            raise SchemaError(f"leaf {cid!r} needs a non-empty 'alternatives' list")
        alts = []
        for raw in alts_raw:
            da_id = _require(raw, "id", f"alternative of {cid!r}")
            if not isinstance(da_id, str) or not da_id:
                raise SchemaError(f"alternative id in {cid!r} must be a non-empty string")
            if da_id in da_owner or da_id in components:
                raise DuplicateId(f"design alternative {da_id!r} defined twice")
            counts = _require(raw, "estimate", f"alternative {da_id!r}")
            if not isinstance(counts, list):
                raise SchemaError(f"alternative {da_id!r}: 'estimate' must be a list of counts")
            est = make_estimate(scale, counts)
            if not est.is_interval:
                raise EstimateError(f"alternative {da_id!r}: {est} is not an interval estimate")
            da_owner[da_id] = cid
            alts.append(DesignAlternative(da_id, cid, est))
        components[cid] = Component(cid, alternatives=tuple(alts))

    clash = set(components) & set(da_owner)
    if clash:
        raise DuplicateId(f"ids used for both a component and an alternative: {sorted(clash)}")

    parent: dict[str, str] = {}
    for comp in components.values():
        for child in comp.children:
            if child not in components:
                raise UnknownReference(f"composite {comp.id!r} refers to unknown component {child!r}")
            if child in parent:
                raise SchemaError(f"component {child!r} has two parents ({parent[child]!r}, {comp.id!r})")
            parent[child] = comp.id

    roots = [cid for cid in components if cid not in parent]
    root = document.get("root")
    if root is None:
        if len(roots) != 1:
            raise SchemaError(f"model must have exactly one root, found {sorted(roots)}")
        root = roots[0]
    elif root not in components:
        raise UnknownReference(f"root {root!r} is not a component")
    elif root in parent:
        raise SchemaError(f"root {root!r} has a parent")
    reachable = set()
    stack = [root]
    while stack:
        cid = stack.pop()
        if cid in reachable:
            raise SchemaError(f"component graph has a cycle through {cid!r}")
        reachable.add(cid)
        stack.extend(components[cid].children)
    if reachable != set(components):
        raise SchemaError(f"components not reachable from root {root!r}: {sorted(set(components) - reachable)}")

    entries: dict[frozenset, int] = {}
    for raw in _require(document, "compatibility", "model"):
        a = _require(raw, "a", "compatibility entry")
        b = _require(raw, "b", "compatibility entry")
        w = _int_field(raw, "w", f"compatibility ({a}, {b})")
        for x in (a, b):
            if x not in da_owner:
                raise UnknownReference(f"compatibility entry refers to unknown alternative {x!r}")
        if da_owner[a] == da_owner[b]:
            raise SchemaError(f"compatibility ({a}, {b}): both alternatives belong to {da_owner[a]!r}")
        if not 0 <= w <= nu:
            raise SchemaError(f"compatibility ({a}, {b}) = {w} outside [0, {nu}]")
        key = frozenset((a, b))
        if key in entries:
            raise DuplicateId(f"compatibility ({a}, {b}) given twice")
        entries[key] = w

    for comp in components.values():
        leaf_kids = [components[c] for c in comp.children if components[c].is_leaf]
        for left, right in combinations(leaf_kids, 2):
            for da in left.alternatives:
                for db in right.alternatives:
                    if frozenset((da.id, db.id)) not in entries:
                        raise MissingCompatibility(
                            f"no compatibility entry for ({da.id}, {db.id}) under {comp.id!r}"
                        )

    return MorphModel(
        scale=scale,
        nu=nu,
        root=root,
        components=components,
        compatibility=CompatibilityTable(entries, nu),
        name=str(document.get("name", "")),
        reference=document.get("reference"),
    )


def load_model(path: str | Path) -> MorphModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def serialize_model(model: MorphModel) -> dict[str, Any]:
    """Inverse of :func:`parse_model` (flat component list)."""
    comps = []
    for comp in model.components.values():
        if comp.is_leaf:
            comps.append({
                "id": comp.id,
                "alternatives": [{"id": a.id, "estimate": list(a.estimate.counts)} for a in comp.alternatives],
            })
        else:
            comps.append({"id": comp.id, "children": list(comp.children)})
    order = {da: i for i, da in enumerate(model._da_index)}
    compat = []
    for key, w in model.compatibility.items():
        a, b = sorted(key, key=lambda x: order.get(x, len(order)))
        compat.append({"a": a, "b": b, "w": w})
    compat.sort(key=lambda e: (order[e["a"]], order[e["b"]]))
    doc: dict[str, Any] = {}
    if model.name:
        doc["name"] = model.name
    doc.update({
        "scale": {"l": model.scale.l, "eta": model.scale.eta},
        "nu": model.nu,
        "root": model.root,
        "components": comps,
        "compatibility": compat,
    })
    if model.reference is not None:
        doc["reference"] = model.reference
    return doc


def design_space_size(model: MorphModel, component: str | None = None) -> int:
    """Number of leaf-level combinations under ``component`` (default: root)."""
    comp = model.component(component or model.root)
    if comp.is_leaf:
        return len(comp.alternatives)
    return math.prod(design_space_size(model, c) for c in comp.children)


def load_builtin_json(name: str) -> dict[str, Any]:
    text = resources.files("morphsynth").joinpath("data").joinpath(name).read_text(encoding="utf-8")
    return json.loads(text)


def builtin_dataset() -> MorphModel:
    """On-board telemetry subsystem: 9 leaves, composites D, E, F under root A."""
    return parse_model(load_builtin_json("onboard.json"))
