"""Interval multiset estimates over an ordinal scale.

An estimate places ``eta`` elements on the levels ``1..l`` of an ordinal scale
(level 1 is best) and is stored in position form, i.e. as the count vector
``(n_1, ..., n_l)``. Comparison, proximity and medians all work on the
cumulative profile ``c[k] = n_1 + ... + n_k`` (k = 1..l-1): moving one element
up by one level raises exactly one profile coordinate by one.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    CardinalityMismatch,
    EmptyInput,
    EstimateError,
    ScaleMismatch,
    WrongLength,
)

__all__ = [
    "Scale",
    "MultisetEstimate",
    "ProximityVector",
    "Dominance",
    "Median",
    "make_estimate",
    "parse_estimate",
    "parse_estimates",
    "multiset_coefficient",
    "interval_count",
    "enumerate_scale",
    "hasse_edges",
    "dominates",
    "integrate",
    "proximity",
    "representative",
    "generalized_median",
    "set_median",
]


@dataclass(frozen=True)
class Scale:
    """Assessment problem ``P^{l,eta}``: ``l`` levels, ``eta`` elements."""

    l: int
    eta: int

    def __post_init__(self):
        if not isinstance(self.l, int) or not isinstance(self.eta, int):
            raise EstimateError(f"scale parameters must be integers, got l={self.l!r}, eta={self.eta!r}")
        if self.l < 1 or self.eta < 1:
            raise EstimateError(f"scale needs l >= 1 and eta >= 1, got l={self.l}, eta={self.eta}")

    def __str__(self) -> str:
        return f"P{self.l},{self.eta}"

    @classmethod
    def parse(cls, text: str) -> Scale:
        m = re.fullmatch(r"P?(\d+),(\d+)", text.strip())
        if not m:
            raise EstimateError(f"cannot parse scale {text!r}; expected e.g. 'P4,3' or '4,3'")
        return cls(int(m.group(1)), int(m.group(2)))

    def ideal(self) -> MultisetEstimate:
        return MultisetEstimate((self.eta,) + (0,) * (self.l - 1))

    def worst(self) -> MultisetEstimate:
        return MultisetEstimate((0,) * (self.l - 1) + (self.eta,))


@dataclass(frozen=True, order=False)
class MultisetEstimate:
    """Position-form count vector. The scale is implied by length and total."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(self.counts)
        object.__setattr__(self, "counts", counts)
        if not counts:
            raise WrongLength("estimate needs at least one level")
        if any((not isinstance(c, int)) or c < 0 for c in counts):
            raise EstimateError(f"counts must be non-negative integers: {counts}")
        if sum(counts) == 0:
            raise CardinalityMismatch("estimate must hold at least one element")

    @property
    def l(self) -> int:
        return len(self.counts)

    @property
    def eta(self) -> int:
        return sum(self.counts)

    @property
    def scale(self) -> Scale:
        return Scale(self.l, self.eta)

    @property
    def profile(self) -> tuple[int, ...]:
        """Cumulative profile, length ``l - 1``, non-decreasing and bounded by ``eta``."""
        out = []
        total = 0
        for c in self.counts[:-1]:
            total += c
            out.append(total)
        return tuple(out)

    @property
    def is_interval(self) -> bool:
        support = [i for i, c in enumerate(self.counts) if c]
        return support[-1] - support[0] + 1 == len(support)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.counts) + ")"

    def __repr__(self) -> str:
        return f"MultisetEstimate{self}"

    def __iter__(self):
        return iter(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, i):
        return self.counts[i]


class ProximityVector(NamedTuple):
    minus: int  # improvement steps
    plus: int  # degradation steps

    @property
    def magnitude(self) -> int:
        return self.minus + self.plus

    def __abs__(self) -> int:
        return self.magnitude


class Dominance(enum.Enum):
    BETTER = "better"
    WORSE = "worse"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Median:
    """All minimisers of the total proximity magnitude, plus the minimum."""

    ties: tuple[MultisetEstimate, ...]
    deviation: int

    @property
    def best(self) -> MultisetEstimate:
        return representative(self.ties)

    def __contains__(self, e) -> bool:
        return e in self.ties


def make_estimate(scale: Scale, counts: Iterable[int]) -> MultisetEstimate:
    counts = tuple(counts)
    if len(counts) != scale.l:
        raise WrongLength(f"expected {scale.l} counts for {scale}, got {len(counts)}")
    if any((not isinstance(c, int)) or c < 0 for c in counts):
        raise EstimateError(f"counts must be non-negative integers: {counts}")
    if sum(counts) != scale.eta:
        raise CardinalityMismatch(f"counts {counts} sum to {sum(counts)}, {scale} needs {scale.eta}")
    return MultisetEstimate(counts)


_VECTOR = re.compile(r"\((\d+(?:,\d+)*)\)")


def parse_estimate(text: str, scale: Scale | None = None) -> MultisetEstimate:
    """Parse ``"(2,1,0,0)"``. With a scale, length and cardinality are checked."""
    m = _VECTOR.fullmatch(text.strip())
    if not m:
        raise EstimateError(f"cannot parse estimate {text!r}; expected e.g. '(2,1,0,0)'")
    counts = tuple(int(x) for x in m.group(1).split(","))
    if scale is not None:
        return make_estimate(scale, counts)
    return MultisetEstimate(counts)


def parse_estimates(text: str, scale: Scale | None = None) -> list[MultisetEstimate]:
    """Parse a ``;``-separated list such as ``"(2,1,0,0);(0,2,1,0)"``."""
    parts = [p for p in text.split(";") if p.strip()]
    if not parts:
        raise EmptyInput("no estimates given")
    return [parse_estimate(p, scale) for p in parts]


def multiset_coefficient(l: int, eta: int) -> int:
    """Number of multisets of size ``eta`` over ``l`` levels, ``C(l+eta-1, eta)``.

    Python integers are exact, so large arguments never wrap.
    """
    if l < 1 or eta < 1:
        raise EstimateError(f"multiset coefficient needs l >= 1 and eta >= 1, got ({l}, {eta})")
    return math.comb(l + eta - 1, eta)


def interval_count(l: int, eta: int) -> int:
    """Closed form for the number of interval estimates in ``P^{l,eta}``."""
    return sum((l - k + 1) * math.comb(eta - 1, k - 1) for k in range(1, min(l, eta) + 1))


def _compositions(total: int, parts: int):
    # strictly positive compositions of `total` into `parts` pieces
    for cuts in combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


@lru_cache(maxsize=64)
def _scale_estimates(l: int, eta: int) -> tuple[MultisetEstimate, ...]:
    out = []
    for width in range(1, min(l, eta) + 1):
        for start in range(l - width + 1):
            for comp in _compositions(eta, width):
                counts = [0] * l
                counts[start:start + width] = comp
                out.append(MultisetEstimate(tuple(counts)))
    out.sort(key=lambda e: e.profile, reverse=True)
    return tuple(out)


def enumerate_scale(scale: Scale) -> list[MultisetEstimate]:
    """All interval estimates of the scale, best-first by cumulative profile."""
    return list(_scale_estimates(scale.l, scale.eta))


def _check_comparable(e1: MultisetEstimate, e2: MultisetEstimate) -> None:
    if e1.l != e2.l or e1.eta != e2.eta:
        raise ScaleMismatch(f"{e1} ({e1.scale}) and {e2} ({e2.scale}) are on different scales")


def dominates(e1: MultisetEstimate, e2: MultisetEstimate) -> Dominance:
    """Poset comparison: ``e1`` is better iff its profile is pointwise >= ``e2``'s."""
    _check_comparable(e1, e2)
    ge = le = True
    for a, b in zip(e1.profile, e2.profile):
        if a < b:
            ge = False
        elif a > b:
            le = False
    if ge and le:
        return Dominance.EQUAL
    if ge:
        return Dominance.BETTER
    if le:
        return Dominance.WORSE
    return Dominance.INCOMPARABLE


def hasse_edges(estimates: Sequence[MultisetEstimate]) -> list[tuple[MultisetEstimate, MultisetEstimate]]:
    """Covering pairs ``(upper, lower)`` of the dominance order restricted to ``estimates``."""
    items = list(dict.fromkeys(estimates))
    better = {
        (a, b) for a in items for b in items if dominates(a, b) is Dominance.BETTER
    }
    edges = []
    for a, b in better:
        if not any((a, c) in better and (c, b) in better for c in items):
            edges.append((a, b))
    order = {e: i for i, e in enumerate(items)}
    edges.sort(key=lambda ab: (order[ab[0]], order[ab[1]]))
    return edges


def integrate(estimates: Sequence[MultisetEstimate]) -> MultisetEstimate:
    """Level-wise sum of estimates; the result may be non-interval."""
    if not estimates:
        raise EmptyInput("integrate needs at least one estimate")
    l = estimates[0].l
    for e in estimates:
        if e.l != l:
            raise ScaleMismatch(f"cannot integrate {e} with estimates over {l} levels")
    return MultisetEstimate(tuple(sum(col) for col in zip(*(e.counts for e in estimates))))


def proximity(e1: MultisetEstimate, e2: MultisetEstimate) -> ProximityVector:
    """One-level element moves turning ``e1`` into ``e2``, split by direction."""
    _check_comparable(e1, e2)
    minus = plus = 0
    for a, b in zip(e1.profile, e2.profile):
        if b > a:
            minus += b - a
        else:
            plus += a - b
    return ProximityVector(minus, plus)


def _distance(p1: tuple[int, ...], p2: tuple[int, ...]) -> int:
    return sum(abs(a - b) for a, b in zip(p1, p2))


def representative(ties: Sequence[MultisetEstimate]) -> MultisetEstimate:
    """Deterministic pick among tied medians.

    Poset-maximal members first, then the lexicographically largest profile.
    """
    if not ties:
        raise EmptyInput("no tied estimates to choose from")
    maximal = [
        a for a in ties
        if not any(dominates(b, a) is Dominance.BETTER for b in ties)
    ]
    return max(maximal, key=lambda e: e.profile)


def _median_over(candidates: Sequence[MultisetEstimate], estimates: Sequence[MultisetEstimate]) -> Median:
    profiles = [e.profile for e in estimates]
    best = None
    ties: list[MultisetEstimate] = []
    for m in candidates:
        pm = m.profile
        total = sum(_distance(pm, p) for p in profiles)
        if best is None or total < best:
            best, ties = total, [m]
        elif total == best:
            ties.append(m)
    return Median(tuple(ties), best)


def _check_pool(estimates: Sequence[MultisetEstimate], scale: Scale | None) -> Scale:
    if not estimates:
        raise EmptyInput("median needs at least one estimate")
    scale = scale or estimates[0].scale
    for e in estimates:
        if e.l != scale.l or e.eta != scale.eta:
            raise ScaleMismatch(f"{e} is not an estimate of {scale}")
    return scale


def generalized_median(estimates: Sequence[MultisetEstimate], scale: Scale | None = None) -> Median:
    """Minimise total proximity magnitude over every interval estimate of the scale."""
    scale = _check_pool(estimates, scale)
    return _median_over(enumerate_scale(scale), estimates)


def set_median(estimates: Sequence[MultisetEstimate]) -> Median:
    """Same objective as :func:`generalized_median`, candidates drawn from the input."""
    _check_pool(estimates, None)
    return _median_over(list(dict.fromkeys(estimates)), estimates)
