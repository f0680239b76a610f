"""Cluster decompositions of configurations under a clustering rule.

Parts of a decomposition are stored as blocks of indices into the distinct
points of the parent configuration. A valid decomposition never splits a
point of multiplicity > 1 between parts, because two parts sharing a point
would have separation 0, contradicting the distance bound between clusters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import (
    ClusteringRule,
    Configuration,
    InputError,
    InvariantViolation,
    center_of_mass,
    radius,
)

BRUTE_FORCE_LIMIT = 8

Block = frozenset


def _check_size(n: int, rule: ClusteringRule):
    if n > rule.N:
        raise InputError(f"rule too short: size {n} exceeds N = {rule.N}")


def is_confined(config: Configuration, rule: ClusteringRule) -> bool:
    n = config.n
    if n < 1:
        raise InputError("empty configuration")
    _check_size(n, rule)
    return radius(config) < rule.radius_bound(n)


def is_separated(c1: Configuration, c2: Configuration, rule: ClusteringRule) -> bool:
    n = c1.n + c2.n
    _check_size(n, rule)
    dist = float(np.linalg.norm(center_of_mass(c1) - center_of_mass(c2)))
    return dist > rule.distance_bound(n)


class _BlockGeometry:
    """Cached size, center and radius of index blocks of one configuration."""

    def __init__(self, config: Configuration, rule: ClusteringRule):
        self.config = config
        self.rule = rule
        self.coords = config.coords
        self.w = config.weights
        self._cache: dict[Block, tuple[int, np.ndarray, float]] = {}

    def stats(self, block: Block):
        hit = self._cache.get(block)
        if hit is None:
            idx = sorted(block)
            w = self.w[idx]
            pts = self.coords[idx]
            c = (w @ pts) / w.sum()
            rad = float(np.max(np.linalg.norm(pts - c, axis=1)))
            hit = (int(w.sum()), c, rad)
            self._cache[block] = hit
        return hit

    def confined(self, block: Block) -> bool:
        size, _, rad = self.stats(block)
        _check_size(size, self.rule)
        return rad < self.rule.radius_bound(size)

    def separated(self, a: Block, b: Block) -> bool:
        sa, ca, _ = self.stats(a)
        sb, cb, _ = self.stats(b)
        _check_size(sa + sb, self.rule)
        return float(np.linalg.norm(ca - cb)) > self.rule.distance_bound(sa + sb)


@dataclass(frozen=True)
class ClusterDecomposition:
    parent: Configuration
    blocks: tuple[Block, ...]
    rule: ClusteringRule

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise InputError("empty part")
            if seen & b:
                raise InputError("parts overlap")
            seen |= b
        if seen != set(range(len(self.parent.points))):
            raise InputError("parts do not cover the configuration")
        ordered = tuple(sorted(self.blocks, key=min))
        object.__setattr__(self, "blocks", ordered)
        violations = self.violations()
        if violations:
            raise InputError("not a cluster decomposition: " + "; ".join(violations))

    @classmethod
    def from_parts(cls, parent: Configuration, parts: Sequence[Configuration],
                   rule: ClusteringRule) -> "ClusterDecomposition":
        index = {p: i for i, p in enumerate(parent.points)}
        blocks = []
        for part in parts:
            try:
                blk = frozenset(index[p] for p in part.points)
            except KeyError as exc:
                raise InputError(f"part point {exc} not in parent") from exc
            for p, m in zip(part.points, part.mult):
                if parent.mult[index[p]] != m:
                    raise InputError("a part splits a point of higher multiplicity")
            blocks.append(blk)
        return cls(parent, tuple(blocks), rule)

    def violations(self) -> list[str]:
        geo = _BlockGeometry(self.parent, self.rule)
        out = []
        for b in self.blocks:
            if not geo.confined(b):
                out.append(f"part {sorted(b)} not confined")
        for i, a in enumerate(self.blocks):
            for b in self.blocks[i + 1:]:
                if not geo.separated(a, b):
                    out.append(f"parts {sorted(a)}, {sorted(b)} not separated")
        return out

    @cached_property
    def parts(self) -> tuple[Configuration, ...]:
        return tuple(self.parent.sub(b) for b in self.blocks)

    @property
    def type(self) -> tuple[int, ...]:
        return tuple(sorted((p.n for p in self.parts), reverse=True))

    @property
    def block_set(self) -> frozenset:
        return frozenset(self.blocks)

    def is_trivial(self) -> bool:
        return len(self.blocks) == 1

    def refines(self, other: "ClusterDecomposition") -> bool:
        """True if every part of self lies inside a part of ``other``."""
        return all(any(b <= c for c in other.blocks) for b in self.blocks)

    def to_json(self) -> dict:
        return {"parts": [p.to_json() for p in self.parts], "type": list(self.type)}


def _decomposition(config, blocks, rule) -> ClusterDecomposition:
    return ClusterDecomposition(config, tuple(frozenset(b) for b in blocks), rule)


def _merge_loop(geo: _BlockGeometry, blocks: list[Block], rng: np.random.Generator | None):
    while True:
        pairs = [(i, j) for i in range(len(blocks)) for j in range(i + 1, len(blocks))
                 if not geo.separated(blocks[i], blocks[j])]
        if not pairs:
            return blocks
        i, j = pairs[0] if rng is None else pairs[int(rng.integers(len(pairs)))]
        if not (geo.confined(blocks[i]) and geo.confined(blocks[j])):
            raise InvariantViolation("merge candidates are not both confined")
        merged = blocks[i] | blocks[j]
        if not geo.confined(merged):
            raise InvariantViolation(
                f"merging confined, non-separated parts {sorted(blocks[i])} and "
                f"{sorted(blocks[j])} gave a non-confined part")
        blocks = [b for k, b in enumerate(blocks) if k not in (i, j)] + [merged]


def greedy_cluster_decompose(config: Configuration, rule: ClusteringRule,
                             order_seed: int | None = 0) -> ClusterDecomposition:
    """Merge confined but non-separated parts, starting from the distinct points.

    ``order_seed=None`` always merges the first available pair; an integer
    seed picks pairs uniformly at random.
    """
    _check_size(config.n, rule)
    if config.n == 0:
        raise InputError("empty configuration")
    geo = _BlockGeometry(config, rule)
    rng = None if order_seed is None else np.random.default_rng(order_seed)
    blocks = _merge_loop(geo, [frozenset([i]) for i in range(len(config.points))], rng)
    return _decomposition(config, blocks, rule)


def iter_decompositions(config: Configuration, rule: ClusteringRule,
                        sizes: Sequence[int] | None = None) -> Iterable[tuple[Block, ...]]:
    """All valid cluster decompositions, as block tuples, by exhaustive search.

    Blocks are chosen in order of their smallest index; a candidate block is
    kept only if confined and separated from every block chosen before it.
    ``sizes`` restricts to decompositions of that type (sorted part sizes).
    """
    k = len(config.points)
    if k > BRUTE_FORCE_LIMIT:
        raise InputError(f"{k} distinct points exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    _check_size(config.n, rule)
    geo = _BlockGeometry(config, rule)
    mult = config.mult
    target = None if sizes is None else sorted(sizes, reverse=True)

    # confined blocks, grouped by their smallest element
    by_min: dict[int, list[Block]] = {i: [] for i in range(k)}
    for mask in range(1, 1 << k):
        blk = frozenset(i for i in range(k) if mask >> i & 1)
        if geo.confined(blk):
            by_min[min(blk)].append(blk)

    def rec(used: frozenset, chosen: list[Block]):
        if len(used) == k:
            if target is None or sorted((sum(mult[i] for i in b) for b in chosen),
                                        reverse=True) == target:
                yield tuple(chosen)
            return
        first = min(set(range(k)) - used)
        for blk in by_min[first]:
            if blk & used:
                continue
            if target is not None and sum(mult[i] for i in blk) not in target:
                continue
            if all(geo.separated(blk, c) for c in chosen):
                chosen.append(blk)
                yield from rec(used | blk, chosen)
                chosen.pop()

    yield from rec(frozenset(), [])


def _meet(a: Iterable[Block], b: Iterable[Block]) -> list[Block]:
    return [x & y for x in a for y in b if x & y]


def finest_decomposition(config: Configuration, rule: ClusteringRule,
                         limit: int = BRUTE_FORCE_LIMIT, seeds: int = 16) -> ClusterDecomposition:
    """The common refinement of all cluster decompositions."""
    if config.n == 0:
        raise InputError("empty configuration")
    if len(config.points) <= limit:
        blocks: list[Block] | None = None
        for dec in iter_decompositions(config, rule):
            blocks = list(dec) if blocks is None else _meet(blocks, dec)
        if blocks is None:
            raise InvariantViolation("no cluster decomposition exists")
    else:
        blocks = list(greedy_cluster_decompose(config, rule, None).blocks)
        for s in range(seeds):
            blocks = _meet(blocks, greedy_cluster_decompose(config, rule, s).blocks)
    try:
        return _decomposition(config, blocks, rule)
    except InputError as exc:
        raise InvariantViolation(f"common refinement is not a cluster decomposition: {exc}") from exc


def _same_parent(d1: ClusterDecomposition, d2: ClusterDecomposition):
    if d1.parent != d2.parent or d1.rule != d2.rule:
        raise InputError("decompositions have different parents or rules")


def common_refinement(d1: ClusterDecomposition, d2: ClusterDecomposition) -> ClusterDecomposition:
    _same_parent(d1, d2)
    try:
        return _decomposition(d1.parent, _meet(d1.blocks, d2.blocks), d1.rule)
    except InputError as exc:
        raise InvariantViolation(f"INVARIANT-VIOLATION: common refinement invalid: {exc}") from exc


def common_coarsening(d1: ClusterDecomposition, d2: ClusterDecomposition,
                      order_seed: int | None = None) -> ClusterDecomposition:
    _same_parent(d1, d2)
    allb = set(d1.blocks) | set(d2.blocks)
    for a in allb:
        for b in allb:
            if a & b and not (a <= b or b <= a):
                raise InvariantViolation("parts of two decompositions are neither nested nor disjoint")
    maximal = [a for a in allb if not any(a < b for b in allb)]
    geo = _BlockGeometry(d1.parent, d1.rule)
    rng = None if order_seed is None else np.random.default_rng(order_seed)
    return _decomposition(d1.parent, _merge_loop(geo, maximal, rng), d1.rule)


def stratum_membership(config: Configuration, rule: ClusteringRule, tau: Sequence[int]) -> bool:
    """Whether some decomposition into parts of sizes ``tau`` exists."""
    if sum(tau) != config.n:
        raise InputError(f"partition {tuple(tau)} does not sum to {config.n}")
    return next(iter(iter_decompositions(config, rule, sizes=tau)), None) is not None


# center of mass functions ---------------------------------------------------

@dataclass
class CmReport:
    passed: bool
    max_change: float
    checked: int
    skipped: list[str]

    def to_json(self) -> dict:
        return {"passed": self.passed, "max_change": self.max_change,
                "checked": self.checked, "skipped": self.skipped}


def perturb_within_parts(dec: ClusterDecomposition, rng: np.random.Generator,
                         scale: float = 0.25, tries: int = 20) -> Configuration | None:
    """Move points inside each part, fixing part centers and part sizes.

    Points of higher multiplicity move together. The perturbation of a part
    has weighted mean zero and is scaled to a fraction of the part's
    confinement slack; it is shrunk until the moved parts still form a
    cluster decomposition of the same shape. Returns None if that fails.
    """
    parent, rule = dec.parent, dec.rule
    coords = parent.coords.copy()
    w = parent.weights
    for blk in dec.blocks:
        idx = sorted(blk)
        if len(idx) < 2:
            continue
        size = int(w[idx].sum())
        slack = rule.radius_bound(size) - radius(parent.sub(idx))
        step = rng.normal(size=(len(idx), parent.dim))
        step -= (w[idx] @ step) / w[idx].sum()
        step *= scale * slack / max(np.max(np.linalg.norm(step, axis=1)), 1e-300)
        coords[idx] += step
    factor = 1.0
    base = parent.coords
    for _ in range(tries):
        moved = base + factor * (coords - base)
        pts = [tuple(map(float, p)) for p in moved]
        if len(set(pts)) == len(pts):
            cand = Configuration.from_points(pts, parent.mult, dim=parent.dim)
            order = {p: i for i, p in enumerate(cand.points)}
            blocks = tuple(frozenset(order[pts[i]] for i in blk) for blk in dec.blocks)
            try:
                ClusterDecomposition(cand, blocks, rule)
                return cand
            except InputError:
                pass
        factor /= 2
    return None


def is_cm_function(f: Callable[[Configuration], float], samples: Sequence[Configuration],
                   rule: ClusteringRule, tol: float = 1e-9, perturbations: int = 3,
                   seed: int = 0, decompose: Callable | None = None) -> CmReport:
    """Check that ``f`` only sees cluster centers on the stratum of each sample.

    Each sample is decomposed (finest decomposition by default) and its points
    are moved within parts keeping part centers; the largest change of ``f``
    is reported.
    """
    rng = np.random.default_rng(seed)
    decompose = decompose or (lambda c: finest_decomposition(c, rule))
    worst, checked, skipped = 0.0, 0, []
    for i, z in enumerate(samples):
        try:
            dec = decompose(z)
        except InputError as exc:
            skipped.append(f"sample {i}: {exc}")
            continue
        base = f(z)
        for _ in range(perturbations):
            moved = perturb_within_parts(dec, rng)
            if moved is None:
                skipped.append(f"sample {i}: could not perturb inside the stratum")
                continue
            worst = max(worst, abs(f(moved) - base))
            checked += 1
    return CmReport(checked > 0 and worst <= tol, worst, checked, skipped)
