"""Point configurations, clustering rules, partitions and ordered compositions.

A configuration is a finite multiset of points in R or R^2 (identified with C).
Geometry is Euclidean: the center of mass is the weighted mean.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


class InputError(ValueError):
    """Malformed or out-of-contract input."""


class InvariantViolation(AssertionError):
    """A structural guarantee of the construction failed to hold."""


@dataclass(frozen=True)
class Configuration:
    """Multiset of points with multiplicities, stored canonically.

    ``points`` are distinct tuples of length ``dim`` sorted ascending
    (lexicographically in dim 2); ``mult`` holds the matching multiplicities.
    """

    dim: int
    points: tuple[tuple[float, ...], ...]
    mult: tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InputError(f"dim must be 1 or 2, got {self.dim}")
        if len(self.points) != len(self.mult):
            raise InputError("points and multiplicities differ in length")
        for p in self.points:
            if len(p) != self.dim:
                raise InputError(f"point {p} does not have dimension {self.dim}")
            if not all(np.isfinite(p)):
                raise InputError(f"non-finite coordinate in {p}")
        if any(m <= 0 for m in self.mult):
            raise InputError("multiplicities must be positive")
        if len(set(self.points)) != len(self.points):
            raise InputError("points must be pairwise distinct")
        if list(self.points) != sorted(self.points):
            raise InputError("points are not in canonical order")

    # construction -------------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable, mult: Iterable[int] | None = None,
                    dim: int | None = None) -> "Configuration":
        """Build from raw coordinates, merging exactly equal points."""
        pts = [_as_tuple(p) for p in points]
        ms = [1] * len(pts) if mult is None else [int(m) for m in mult]
        if len(ms) != len(pts):
            raise InputError("points and multiplicities differ in length")
        if dim is None:
            dim = len(pts[0]) if pts else 1
        counts: dict[tuple[float, ...], int] = {}
        for p, m in zip(pts, ms):
            if m <= 0:
                raise InputError("multiplicities must be positive")
            counts[p] = counts.get(p, 0) + m
        keys = sorted(counts)
        return cls(dim, tuple(keys), tuple(counts[k] for k in keys))

    @classmethod
    def from_complex(cls, zs: Iterable[complex]) -> "Configuration":
        return cls.from_points([(float(z.real), float(z.imag)) for z in zs], dim=2)

    @classmethod
    def empty(cls, dim: int = 1) -> "Configuration":
        return cls(dim, (), ())

    @classmethod
    def from_json(cls, data: dict | str) -> "Configuration":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            dim = int(data["dim"])
            pts = data["points"]
            mult = data.get("mult")
        except (KeyError, TypeError) as exc:
            raise InputError(f"configuration JSON missing field: {exc}") from exc
        return cls.from_points(pts, mult, dim=dim)

    def to_json(self) -> dict:
        return {"dim": self.dim, "points": [list(p) for p in self.points],
                "mult": list(self.mult)}

    # views --------------------------------------------------------------

    @property
    def n(self) -> int:
        return sum(self.mult)

    def __len__(self) -> int:
        return self.n

    @property
    def coords(self) -> np.ndarray:
        """Distinct points as a (k, dim) array."""
        return np.array(self.points, dtype=float).reshape(len(self.points), self.dim)

    @property
    def weights(self) -> np.ndarray:
        return np.array(self.mult, dtype=float)

    def flat(self) -> np.ndarray:
        """All points repeated by multiplicity, canonical order, shape (n, dim)."""
        return np.repeat(self.coords, self.mult, axis=0)

    def sorted_reals(self) -> np.ndarray:
        if self.dim != 1:
            raise InputError("expected a configuration on the line")
        return self.flat()[:, 0]

    def as_complex(self) -> np.ndarray:
        """Lifted representative in C^n (dim 2 only)."""
        if self.dim != 2:
            raise InputError("expected a planar configuration")
        f = self.flat()
        return f[:, 0] + 1j * f[:, 1]

    def multiplicity_partition(self) -> tuple[int, ...]:
        return tuple(sorted(self.mult, reverse=True))

    # algebra ------------------------------------------------------------

    def __add__(self, other: "Configuration") -> "Configuration":
        if self.n and other.n and self.dim != other.dim:
            raise InputError("cannot add configurations of different dimension")
        dim = self.dim if self.n else other.dim
        return Configuration.from_points(
            list(self.points) + list(other.points),
            list(self.mult) + list(other.mult), dim=dim)

    def shift(self, v) -> "Configuration":
        v = np.broadcast_to(np.asarray(v, dtype=float), (self.dim,))
        return Configuration.from_points(
            [tuple(float(x) for x in np.asarray(p) + v) for p in self.points],
            self.mult, dim=self.dim)

    def sub(self, indices: Iterable[int]) -> "Configuration":
        """Sub-configuration on the given distinct-point indices."""
        idx = sorted(set(indices))
        return Configuration(self.dim, tuple(self.points[i] for i in idx),
                             tuple(self.mult[i] for i in idx))

    def canonical(self) -> "Configuration":
        return Configuration.from_points(self.points, self.mult, dim=self.dim)


def _as_tuple(p) -> tuple[float, ...]:
    if isinstance(p, complex):
        return (float(p.real), float(p.imag))
    if np.isscalar(p):
        return (float(p),)
    return tuple(float(x) for x in p)


def _require_nonempty(config: Configuration):
    if config.n == 0:
        raise InputError("empty configuration")


def center_of_mass(config: Configuration) -> np.ndarray:
    """Weighted mean of the points; the unique minimiser of the sum of squared distances."""
    _require_nonempty(config)
    w = config.weights
    return (w @ config.coords) / w.sum()


def radius(config: Configuration) -> float:
    """Largest distance from a point to the center of mass."""
    _require_nonempty(config)
    c = center_of_mass(config)
    return float(np.max(np.linalg.norm(config.coords - c, axis=1)))


def separation(c1: Configuration, c2: Configuration) -> float:
    """Smallest distance between a point of ``c1`` and a point of ``c2``."""
    _require_nonempty(c1)
    _require_nonempty(c2)
    diff = c1.coords[:, None, :] - c2.coords[None, :, :]
    return float(np.min(np.linalg.norm(diff, axis=2)))


# clustering rules -----------------------------------------------------------

@dataclass(frozen=True)
class ClusteringRule:
    """Scale sequences ``r[k-1] = r_k`` and ``d[k-1] = d_k`` for k = 1..N."""

    r: tuple[float, ...]
    d: tuple[float, ...]
    r_conv: float = field(default=float("inf"), compare=False)

    def __post_init__(self):
        if len(self.r) != len(self.d) or not self.r:
            raise InputError("r and d must be nonempty and of equal length")

    @property
    def N(self) -> int:
        return len(self.r)

    def radius_bound(self, k: int) -> float:
        return self.r[k - 1]

    def distance_bound(self, k: int) -> float:
        return self.d[k - 1]

    @classmethod
    def from_json(cls, data: dict | str) -> "ClusteringRule":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(tuple(float(x) for x in data["r"]), tuple(float(x) for x in data["d"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"rule JSON missing field: {exc}") from exc

    def to_json(self) -> dict:
        return {"r": list(self.r), "d": list(self.d)}


def make_clustering_rule(N: int, d2: float, eps: float) -> ClusteringRule:
    """The explicit recursive construction of a valid rule."""
    if N < 1 or not d2 > 0 or not eps > 0:
        raise InputError("need N >= 1, d2 > 0 and eps > 0")
    r = [d2 / (6 * (1 + eps))]
    d = [0.0]
    if N >= 2:
        d.append(float(d2))
    for k in range(2, N + 1):
        r.append((1 + eps) * (d[k - 1] + r[k - 2]))
        if k < N:
            d.append((1 + eps) * 6 * r[k - 1])
    return ClusteringRule(tuple(r), tuple(d))


@lru_cache(maxsize=None)
def _pair_indices(N: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.meshgrid(np.arange(1, N), np.arange(1, N), indexing="ij")
    keep = a + b <= N
    return a[keep], b[keep]


def validate_rule(rule: ClusteringRule) -> tuple[bool, list[str]]:
    """Check the defining and the derived inequalities; return (ok, violations)."""
    r, d, N = np.asarray(rule.r, float), np.asarray(rule.d, float), rule.N
    bad: list[str] = []
    if not r[0] > 0:
        bad.append("r_1 must be positive")
    if d[0] != 0:
        bad.append("d_1 must be 0")
    k = np.arange(2, N + 1)
    rk, rp, dk, dp = r[1:], r[:-1], d[1:], d[:-1]
    for mask, msg in ((~(rk > rp), "r_{k} <= r_{p}"), (~(dk > dp), "d_{k} <= d_{p}"),
                      (~(rk > dk + rp), "r_{k} <= d_{k} + r_{p}"), (~(dk > 6 * rp), "d_{k} <= 6 r_{p}")):
        bad.extend(msg.format(k=i, p=i - 1) for i in k[mask])
    if N >= 2:
        a, b = _pair_indices(N)
        ra, rb, rs, ds = r[a - 1], r[b - 1], r[a + b - 1], d[a + b - 1]
        for i in np.flatnonzero(~(rs > ds + np.maximum(ra, rb))):
            bad.append(f"r_{a[i] + b[i]} <= d_{a[i] + b[i]} + max(r_{a[i]}, r_{b[i]})")
        for i in np.flatnonzero(~(ds > 3 * (ra + rb))):
            bad.append(f"d_{a[i] + b[i]} <= 3 (r_{a[i]} + r_{b[i]})")
    return not bad, bad


def _feasible_interval(r: list[float], d: list[float], which: str, k: int):
    """Open interval of values for one parameter with all others held fixed."""
    lo, hi = 0.0, float("inf")
    N = len(r)
    if which == "r":
        if k >= 2:
            lo = max(lo, r[k - 2], d[k - 1] + r[k - 2])
        if k <= N - 1:
            hi = min(hi, r[k], r[k] - d[k], d[k] / 6)
    else:
        lo = max(lo, d[k - 2], 6 * r[k - 2])
        if k <= N - 1:
            hi = min(hi, d[k])
        hi = min(hi, r[k - 1] - r[k - 2])
    return lo, hi


def relax_rule(rule: ClusteringRule, fraction: float = 0.5) -> ClusteringRule:
    """Strictly enlarge every r_k and shrink every d_k (k >= 2), keeping validity.

    Parameters are moved one at a time strictly inside their open feasible
    interval, by ``fraction`` of the available slack.
    """
    ok, why = validate_rule(rule)
    if not ok:
        raise InputError(f"invalid rule: {why[0]}")
    r, d = list(rule.r), list(rule.d)
    N = rule.N
    for k in range(N, 0, -1):
        lo, hi = _feasible_interval(r, d, "r", k)
        target = r[k - 1] * 2 if hi == float("inf") else r[k - 1] + fraction * (hi - r[k - 1])
        r[k - 1] = target
    for k in range(2, N + 1):
        lo, hi = _feasible_interval(r, d, "d", k)
        d[k - 1] = d[k - 1] - fraction * (d[k - 1] - lo)
    out = ClusteringRule(tuple(r), tuple(d))
    ok, why = validate_rule(out)
    if not ok:
        raise InvariantViolation(f"relaxation produced an invalid rule: {why}")
    return out


# partitions and compositions ------------------------------------------------

def enumerate_partitions(n: int) -> list[tuple[int, ...]]:
    """Weakly decreasing positive tuples summing to n."""
    out: list[tuple[int, ...]] = []

    def rec(rest: int, cap: int, acc: tuple[int, ...]):
        if rest == 0:
            out.append(acc)
            return
        for part in range(min(rest, cap), 0, -1):
            rec(rest - part, part, acc + (part,))

    rec(n, n, ())
    return out


def is_composition(comp: Sequence[int], n: int | None = None) -> bool:
    if len(comp) < 2 or comp[0] < 0 or comp[-1] < 0:
        return False
    if any(m < 1 for m in comp[1:-1]):
        return False
    return n is None or sum(comp) == n


def enumerate_compositions(n: int, k: int | None = None) -> list[tuple[int, ...]]:
    """Ordered compositions (n_L, m_1, ..., m_k, n_R) of n, optionally with fixed k."""
    out = []
    for cuts in cut_subsets(n):
        comp = cuts_to_composition(cuts, n)
        if k is None or len(comp) == k + 2:
            out.append(comp)
    return sorted(out, key=lambda c: (len(c), c))


def cut_subsets(n: int) -> list[tuple[int, ...]]:
    """Nonempty increasing subsets of {0, ..., n}."""
    return [c for r in range(1, n + 2) for c in itertools.combinations(range(n + 1), r)]


def cuts_to_composition(cuts: Sequence[int], n: int) -> tuple[int, ...]:
    cuts = list(cuts)
    if not cuts or any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise InputError("cut indices must be nonempty and strictly increasing")
    if cuts[0] < 0 or cuts[-1] > n:
        raise InputError("cut index out of range")
    return (cuts[0], *(b - a for a, b in zip(cuts, cuts[1:])), n - cuts[-1])


def composition_to_cuts(comp: Sequence[int]) -> tuple[int, ...]:
    if not is_composition(comp):
        raise InputError(f"not an ordered composition: {tuple(comp)}")
    cuts = [comp[0]]
    for m in comp[1:-1]:
        cuts.append(cuts[-1] + m)
    return tuple(cuts)


def random_configuration(rng: np.random.Generator, n: int, dim: int = 2,
                         scale: tuple[float, float] = (1e-2, 1e3),
                         multiplicity_prob: float = 0.0) -> Configuration:
    """Hierarchically clumped random configuration.

    The n points are split into random groups whose centers are spread at a
    log-uniform scale; each group is filled recursively at a smaller scale.
    This visits many cluster strata, unlike i.i.d. sampling.
    With probability ``multiplicity_prob`` a point repeats the previous one.
    """
    if n == 0:
        return Configuration.empty(dim)
    lo, hi = np.log10(scale[0]), np.log10(scale[1])
    pts: list[np.ndarray] = []

    def fill(center: np.ndarray, count: int, top: float):
        if count == 1 or top <= lo:
            for _ in range(count):
                if pts and rng.random() < multiplicity_prob:
                    pts.append(pts[-1])
                else:
                    pts.append(center + 10.0 ** lo * rng.normal(size=dim))
            return
        groups = int(rng.integers(1, count + 1))
        cuts = np.sort(rng.choice(np.arange(1, count), size=groups - 1, replace=False)) if groups > 1 else []
        sizes = np.diff(np.concatenate([[0], cuts, [count]])).astype(int)
        spread = 10.0 ** rng.uniform(lo, top)
        for size in sizes:
            child = center + spread * rng.normal(size=dim)
            fill(child, int(size), np.log10(spread) - rng.uniform(0.3, 2.0))

    fill(np.zeros(dim), n, hi)
    return Configuration.from_points([tuple(map(float, p)) for p in pts], dim=dim)
