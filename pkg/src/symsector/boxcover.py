"""Boxes around clusters on the line and the cover of Sym^n(R) they define.

A part of size k centred at x gets the closed box [x - k b, x + k b].  The box
decomposition of a configuration is obtained by merging overlapping boxes,
starting from one box per point.  For cut points a_0 < ... < a_n the set
U_{k, n-k} consists of configurations whose boxes miss a_k and which have
exactly k points to the left of a_k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import (
    ClusteringRule,
    Configuration,
    InputError,
    InvariantViolation,
    composition_to_cuts,
    cuts_to_composition,
    is_composition,
)
from .regmax import SMOOTH_BUMP, Bump, reg_max


@dataclass(frozen=True)
class BoxParams:
    b: float
    a: tuple[float, ...]
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        if not self.b > 0:
            raise InputError("box unit b must be positive")
        if not self.a:
            raise InputError("need at least one cut point")
        if self.a[0] < -1 or self.a[-1] > 1:
            raise InputError("cut points must lie in [-1, 1]")
        gaps = np.diff(self.a)
        if np.any(gaps <= 2 * self.b):
            raise InputError("consecutive cut points must be more than 2b apart")
        if self.delta < 0 or self.delta >= self.b / 10:
            raise InputError("smoothing width must satisfy 0 <= delta < b/10")

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @classmethod
    def uniform(cls, n: int, b: float | None = None, delta: float | None = None) -> "BoxParams":
        """Equally spaced cuts on [-1, 1]; default b = 1/(2n) and delta = b/100."""
        a = np.linspace(-1, 1, n + 1) if n > 0 else np.array([0.0])
        if b is None:
            b = 1.0 / (2 * max(n, 1))
        if delta is None:
            delta = b / 100
        return cls(b, tuple(a), delta)

    def check_rule(self, rule: ClusteringRule):
        """Boxes must be much wider than clusters: b > 10 r_N."""
        if not self.b > 10 * rule.r[-1]:
            raise InputError(f"b = {self.b} is not larger than 10 r_N = {10 * rule.r[-1]}")

    def to_json(self) -> dict:
        return {"b": self.b, "a": list(self.a), "delta": self.delta}


@dataclass(frozen=True)
class Box:
    center: float
    halfwidth: float

    @property
    def lo(self) -> float:
        return self.center - self.halfwidth

    @property
    def hi(self) -> float:
        return self.center + self.halfwidth

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def inside(self, other: "Box") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def meets(self, other: "Box") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi


def box_of(xs: Sequence[float], b: float) -> Box:
    xs = np.asarray(xs, dtype=float)
    return Box(float(xs.mean()), len(xs) * b)


@dataclass(frozen=True)
class BoxDecomposition:
    """Runs ``(start, stop)`` of the sorted points, left to right, and their boxes."""

    xs: tuple[float, ...]
    runs: tuple[tuple[int, int], ...]
    boxes: tuple[Box, ...]

    def parts(self) -> list[tuple[float, ...]]:
        return [self.xs[s:e] for s, e in self.runs]

    def covers(self, x: float) -> bool:
        return any(box.contains(x) for box in self.boxes)


def _sorted_xs(config) -> np.ndarray:
    if isinstance(config, Configuration):
        return config.sorted_reals()
    return np.sort(np.asarray(config, dtype=float))


def is_well_contained(part: Sequence[float], b: float) -> bool:
    xs = np.sort(np.asarray(part, dtype=float))
    if xs.size == 0:
        raise InputError("empty part")
    n = len(xs)
    csum = np.concatenate([[0.0], np.cumsum(xs)])
    whole = Box(csum[n] / n, n * b)
    for i in range(n):
        for j in range(i + 1, n + 1):
            sub = Box((csum[j] - csum[i]) / (j - i), (j - i) * b)
            if not sub.inside(whole):
                return False
    return True


def box_decompose(config, b: float, rng: np.random.Generator | None = None) -> BoxDecomposition:
    """Merge overlapping neighbouring boxes until all boxes are disjoint.

    Parts stay consecutive runs with increasing centers, so a box can only
    overlap a box that is not adjacent if it also overlaps its neighbour;
    merging adjacent pairs therefore suffices.  With ``rng`` the pair to
    merge is chosen at random, otherwise the leftmost one.
    """
    xs = _sorted_xs(config)
    if xs.size == 0:
        return BoxDecomposition((), (), ())
    runs = [(i, i + 1) for i in range(len(xs))]
    sums = list(xs)
    while True:
        boxes = [Box(s / (e - i), (e - i) * b) for (i, e), s in zip(runs, sums)]
        hits = [j for j in range(len(runs) - 1) if boxes[j].meets(boxes[j + 1])]
        if not hits:
            break
        j = hits[0] if rng is None else hits[int(rng.integers(len(hits)))]
        runs[j:j + 2] = [(runs[j][0], runs[j + 1][1])]
        sums[j:j + 2] = [sums[j] + sums[j + 1]]
    return BoxDecomposition(tuple(float(x) for x in xs), tuple(runs), tuple(boxes))


def _is_valid_grouping(xs, runs, b) -> bool:
    boxes = [box_of(xs[s:e], b) for s, e in runs]
    if any(not boxes[i].hi < boxes[i + 1].lo for i in range(len(boxes) - 1)):
        return False
    return all(is_well_contained(xs[s:e], b) for s, e in runs)


def brute_force_box_decompositions(config, b: float) -> list[tuple[tuple[int, int], ...]]:
    """All groupings into consecutive runs with disjoint ordered boxes and well-contained parts."""
    xs = _sorted_xs(config)
    n = len(xs)
    out = []
    for mask in range(1 << max(n - 1, 0)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        runs = tuple(zip(cuts, cuts[1:]))
        if _is_valid_grouping(xs, runs, b):
            out.append(runs)
    return out


def _check_k(params: BoxParams, n: int, k: int):
    if params.n != n:
        raise InputError(f"configuration has {n} points but there are {params.n + 1} cut points")
    if not 0 <= k <= n:
        raise InputError(f"cut index {k} out of range 0..{n}")


def membership_boxes(config, params: BoxParams, k: int) -> bool:
    xs = _sorted_xs(config)
    _check_k(params, len(xs), k)
    a = params.a[k]
    if int(np.sum(xs < a)) != k or np.any(xs == a):
        return False
    return not box_decompose(xs, params.b).covers(a)


def rho_terms(config, params: BoxParams, k: int) -> np.ndarray:
    """The window terms whose maximum defines the boundary of U_{k, n-k}.

    Left terms use the windows x_{k-i}..x_k (1-indexed, i = 0..k-1), right
    terms the windows x_{k+1}..x_{k+1+i} (i = 0..n-k-1).
    """
    xs = _sorted_xs(config)
    n = len(xs)
    _check_k(params, n, k)
    a, b = params.a[k], params.b
    left = xs[:k][::-1]
    right = xs[k:]
    sizes_l = np.arange(1, k + 1)
    sizes_r = np.arange(1, n - k + 1)
    lt = np.cumsum(left) / sizes_l + sizes_l * b - a
    rt = a - np.cumsum(right) / sizes_r + sizes_r * b
    return np.concatenate([lt, rt])


def rho(config, params: BoxParams, k: int) -> float:
    terms = rho_terms(config, params, k)
    return float(terms.max()) if terms.size else float("-inf")


def rho_smoothed(config, params: BoxParams, k: int, bump: Bump = SMOOTH_BUMP) -> float:
    if not params.delta > 0:
        raise InputError("smoothing needs delta > 0")
    terms = rho_terms(config, params, k)
    return reg_max(terms, params.delta, bump) if terms.size else float("-inf")


def cover_witness(config, params: BoxParams) -> int:
    """First k whose cover set contains the configuration."""
    xs = _sorted_xs(config)
    for k in range(len(xs) + 1):
        if membership_boxes(xs, params, k):
            return k
    raise InvariantViolation(f"INVARIANT-VIOLATION: no cover set contains {list(xs)} for cuts {params.a}")


def intersection_as_refinement(cuts: Sequence[int], n: int) -> tuple[int, ...]:
    return cuts_to_composition(cuts, n)


def refined_membership(config, params: BoxParams, comp: Sequence[int]) -> bool:
    xs = _sorted_xs(config)
    if not is_composition(comp, len(xs)):
        raise InputError(f"{tuple(comp)} is not a composition of {len(xs)}")
    return all(membership_boxes(xs, params, k) for k in composition_to_cuts(comp))


@dataclass(frozen=True)
class Factor:
    """One factor of a refined cover set: a point group, its cuts and composition."""

    points: slice
    cuts: tuple[float, ...]
    composition: tuple[int, ...]

    def params(self, b: float, delta: float = 0.0) -> BoxParams:
        return BoxParams(b, self.cuts, delta)


def product_split(comp: Sequence[int], params: BoxParams) -> list[Factor]:
    """Factors (left, each middle block, right) of the refined cover set for ``comp``."""
    n = params.n
    if not is_composition(comp, n):
        raise InputError(f"{tuple(comp)} is not a composition of {n}")
    cuts = composition_to_cuts(comp)
    a = params.a
    factors = [Factor(slice(0, cuts[0]), a[:cuts[0] + 1], (cuts[0], 0))]
    for lo, hi in zip(cuts, cuts[1:]):
        factors.append(Factor(slice(lo, hi), a[lo:hi + 1], (0, hi - lo, 0)))
    factors.append(Factor(slice(cuts[-1], n), a[cuts[-1]:], (0, n - cuts[-1])))
    return factors


def factor_membership(config, params: BoxParams, comp: Sequence[int]) -> bool:
    """Membership in the refined cover set computed factor by factor."""
    xs = _sorted_xs(config)
    for f in product_split(comp, params):
        group = xs[f.points]
        sub = f.params(params.b)
        if not refined_membership(group, sub, f.composition):
            return False
    return True


def random_line_configuration(rng: np.random.Generator, n: int, spread: float = 1.5,
                              cluster_prob: float = 0.5) -> np.ndarray:
    """Points on the line, partly in tight clumps so that boxes interact."""
    xs = []
    while len(xs) < n:
        c = rng.uniform(-spread, spread)
        size = 1 if rng.random() > cluster_prob else int(rng.integers(1, n - len(xs) + 1))
        width = 10 ** rng.uniform(-3, -0.5)
        xs.extend(c + width * rng.normal(size=size))
    return np.sort(np.array(xs[:n]))



def membership_agreement(config, params: BoxParams, k: int, margin: float = 1e-6) -> bool | None:
    """Whether rho < 0 matches the box description of U_{k, n-k}; None when |rho| <= margin."""
    value = rho(config, params, k)
    if abs(value) <= margin:
        return None
    return (value < 0) == membership_boxes(config, params, k)
