"""Potentials on Sym^n(C).

phi_n is the sum of a quadratic form over the points.  The smoothed family
``eval_smoothed`` is additive over cluster decompositions and splits off the
center of mass on deep strata, where a local smoother takes over.  The checks
in this module sample those structural properties numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .clustering import ClusterDecomposition, finest_decomposition
from .config import (
    ClusteringRule,
    Configuration,
    InputError,
    center_of_mass,
    random_configuration,
)
from .regmax import SMOOTH_BUMP, Bump, reg_max

LiftFunction = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class QuadraticPotential:
    """phi(z) = v.Q.v with v = (Re z, Im z); the default is Im(z)^2."""

    Q: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 0.0), (0.0, 1.0))

    def __post_init__(self):
        q = np.asarray(self.Q, dtype=float)
        if q.shape != (2, 2) or not np.allclose(q, q.T, atol=0, rtol=0):
            raise InputError("Q must be a symmetric 2x2 matrix")
        if not np.trace(q) > 0:
            raise InputError("Q must have positive trace")

    @property
    def trace(self) -> float:
        return self.Q[0][0] + self.Q[1][1]

    def __call__(self, z) -> np.ndarray | float:
        z = np.asarray(z)
        x, y = z.real, z.imag
        (a, b), (_, c) = self.Q
        return a * x * x + 2 * b * x * y + c * y * y


DEFAULT_PHI = QuadraticPotential()


def _lift(config) -> np.ndarray:
    if isinstance(config, Configuration):
        return config.as_complex()
    return np.asarray(config, dtype=complex)


def phi_n(config, Q: QuadraticPotential = DEFAULT_PHI) -> float:
    zs = _lift(config)
    return float(np.sum(Q(zs))) if zs.size else 0.0


def translation_identity_check(config, Q: QuadraticPotential = DEFAULT_PHI) -> float:
    """|phi_n(z) - phi_n(z - c) - n phi(c)| divided by the size of the terms."""
    zs = _lift(config)
    if zs.size == 0:
        raise InputError("empty configuration")
    c = zs.mean()
    whole, centered, cm = phi_n(zs, Q), phi_n(zs - c, Q), zs.size * float(Q(c))
    scale = max(1.0, abs(whole), abs(centered), abs(cm))
    return abs(whole - centered - cm) / scale


# smoothed potentials --------------------------------------------------------

Smoother = Callable[[Configuration, float, "SmoothedPotential"], float]

_DISK_U, _DISK_W = np.polynomial.legendre.leggauss(4)
_DISK_RHO = np.sqrt((_DISK_U + 1) / 2)
_DISK_PHASE = np.exp(2j * np.pi * np.arange(8) / 8)


def disk_average(f: Callable[[np.ndarray], np.ndarray], centers, radii) -> np.ndarray:
    """Average of f over disks of the given radii (Gauss rule in r^2, 8 angles).

    Exact for polynomials of degree <= 7 in (Re, Im).
    """
    centers = np.atleast_1d(np.asarray(centers, dtype=complex))
    radii = np.broadcast_to(np.asarray(radii, dtype=float), centers.shape)
    offs = _DISK_RHO[:, None] * _DISK_PHASE[None, :]
    vals = f(centers[:, None, None] + radii[:, None, None] * offs[None])
    return (vals * (_DISK_W / 2)[None, :, None]).sum(axis=(1, 2)) / _DISK_PHASE.size


def _step(u: np.ndarray) -> np.ndarray:
    """Smooth decreasing step: 1 at u <= 0, 0 at u >= 1."""
    return np.clip(1.0 - SMOOTH_BUMP.cdf(np.clip(2 * u - 1, -1, 1)), 0.0, 1.0)


def _step_curvature() -> float:
    """max |beta'(u) + u beta''(u)| for beta = _step, by finite differences on a grid."""
    u = np.linspace(0, 1, 4001)
    h = u[1] - u[0]
    b = _step(np.concatenate([[-h], u, [1 + h]]))
    d1 = (b[2:] - b[:-2]) / (2 * h)
    d2 = (b[2:] - 2 * b[1:-1] + b[:-2]) / h**2
    return float(np.max(np.abs(d1 + u * d2)))


STEP_CURVATURE = _step_curvature()


def interaction_range(rule: ClusteringRule) -> float:
    """Lower bound for distances between points of different parts of any decomposition.

    Parts of sizes a and b have centers more than d_{a+b} apart and points
    within r_a and r_b of their centers; a single point sits at its center.
    """
    rad = [0.0] + list(rule.r[1:])
    R = min(rule.d[a + b - 1] - rad[a - 1] - rad[b - 1]
            for a in range(1, rule.N) for b in range(1, rule.N - a + 1))
    if not R > 0:
        raise InputError("clustering rule leaves no room between parts")
    return float(R)


def pair_weights(zs: np.ndarray, R: float) -> np.ndarray:
    """beta(|z_i - z_j|^2 / R^2) with zero diagonal."""
    d2 = np.abs(zs[:, None] - zs[None, :]) ** 2
    w = _step(d2 / R**2)
    np.fill_diagonal(w, 0.0)
    return w


def default_local_smoother(centered: Configuration, t: float, sp: "SmoothedPotential") -> float:
    """Average of phi_n over a product of disks about a lift of the configuration.

    The disk about z_i has radius s_i with s_i^2 = (2 kappa / tr Q) sum_j
    beta(|z_i - z_j|^2 / R^2), so the average exceeds phi_n by kappa times
    the sum of the pair weights.  R is the interaction range of the rule,
    hence the weights of pairs in different parts vanish and the offsets of
    the parts add up to the same expression for the whole configuration.
    kappa keeps the deviation at most t/2 and the Levi form of the offset
    at most half that of phi_n.
    """
    zs = centered.as_complex()
    w = pair_weights(zs, sp.range)
    radii = np.sqrt(2 * sp.kappa(t) / sp.phi.trace * w.sum(axis=1))
    return float(disk_average(sp.phi, zs, radii).sum())


def uniform_disk_smoother(centered: Configuration, t: float, sp: "SmoothedPotential") -> float:
    """Average over disks of one common radius s with n tr(Q) s^2 / 4 = n t / (2N).

    Its offset depends on the part size only, so eval_smoothed jumps where the
    finest decomposition changes; kept for comparison.
    """
    s = np.sqrt(2 * t / (sp.rule.N * sp.phi.trace))
    return float(disk_average(sp.phi, centered.as_complex(), s).sum())


@dataclass(frozen=True)
class SmoothedPotential:
    rule: ClusteringRule
    t: float
    eps1: float = 1.0
    phi: QuadraticPotential = DEFAULT_PHI
    smoother: Smoother = field(default=default_local_smoother, compare=False)

    def eps(self, n: int) -> float:
        return self.eps1 / 4 ** (n - 1)

    def check(self, n: int):
        if n > self.rule.N:
            raise InputError(f"rule too short: size {n} exceeds N = {self.rule.N}")
        if not 0 < self.t < self.eps(n):
            raise InputError(f"t = {self.t} is outside (0, eps_{n}) = (0, {self.eps(n)})")

    @cached_property
    def range(self) -> float:
        return interaction_range(self.rule)

    def kappa(self, t: float) -> float:
        """Weight of one close pair in the offset."""
        N = self.rule.N
        if N < 2:
            return 0.0
        budget = t / (N * (N - 1))
        curvature = self.phi.trace * self.range**2 / (8 * (N - 1) * STEP_CURVATURE)
        return min(budget, curvature)


def eval_smoothed(config: Configuration, sp: SmoothedPotential) -> float:
    """Smoothed potential evaluated through the finest cluster decomposition."""
    n = config.n
    if n == 0:
        return 0.0
    sp.check(n)
    return _eval(config, sp)


def _eval(config: Configuration, sp: SmoothedPotential) -> float:
    n = config.n
    zs = config.as_complex()
    if len(config.points) == 1:
        # a single point of multiplicity n: already centered
        return n * float(sp.phi(zs[0])) + (sp.smoother(config.shift(-config.coords[0]), sp.t, sp)
                                           if n > 1 else 0.0)
    dec = finest_decomposition(config, sp.rule)
    if not dec.is_trivial():
        return sum(_eval(part, sp) for part in dec.parts)
    c = center_of_mass(config)
    cz = complex(c[0], c[1])
    return n * float(sp.phi(cz)) + sp.smoother(config.shift(-c), sp.t, sp)


def smoothed_lift(sp: SmoothedPotential) -> LiftFunction:
    return lambda zs: eval_smoothed(Configuration.from_complex(zs), sp)


# patching -------------------------------------------------------------------

def varouchas_patch(fV: LiftFunction, fW: LiftFunction, etaV: Callable[[np.ndarray], float],
                    s: float, t: float, bump: Bump = SMOOTH_BUMP) -> LiftFunction:
    """Glue fV and fW along a partition of unity etaV + etaW = 1.

    On the overlap the result is M_{s/4}(fV - s etaW, fW - s etaV); where
    etaV = 1 it is fV and where etaV = 0 it is fW.  When |fV - fW| < 2t < s/2
    near the edges of the overlap the regularized max drops the other entry,
    so the pieces join without a seam.
    """
    if not 0 < t < s / 4:
        raise InputError("need 0 < t < s/4")

    def patched(z):
        ev = float(etaV(z))
        if ev >= 1.0:
            return float(fV(z))
        if ev <= 0.0:
            return float(fW(z))
        ew = 1.0 - ev
        return reg_max([fV(z) - s * ew, fW(z) - s * ev], s / 4, bump)

    return patched


# plurisubharmonicity sampling ----------------------------------------------

@dataclass
class PshReport:
    passed: bool
    margins_mean: list[float]
    margins_laplacian: list[float]
    failures: list[dict]
    skipped: int

    @property
    def min_margin(self) -> float:
        vals = self.margins_mean + self.margins_laplacian
        return min(vals) if vals else float("nan")

    def to_json(self) -> dict:
        return {"passed": self.passed, "samples": len(self.margins_mean),
                "min_margin": self.min_margin,
                "min_mean_margin": min(self.margins_mean, default=float("nan")),
                "min_laplacian": min(self.margins_laplacian, default=float("nan")),
                "failures": self.failures, "skipped": self.skipped}


@dataclass(frozen=True)
class DiskSampleSpec:
    n: int
    samples: int = 1000
    seed: int = 0
    radius: float = 1e-2
    step: float = 1e-3
    circle_points: int = 16
    diagonal_gap: float = 1e-3
    scale: tuple[float, float] = (1e-2, 10.0)


def min_gap(zs: np.ndarray) -> float:
    if zs.size < 2:
        return float("inf")
    d = np.abs(zs[:, None] - zs[None, :])
    return float(d[np.triu_indices(zs.size, 1)].min())


def disk_samples(spec: DiskSampleSpec):
    """Yield (point, unit direction) pairs whose disks avoid the diagonal neighbourhood."""
    rng = np.random.default_rng(spec.seed)
    produced = tries = 0
    while produced < spec.samples:
        tries += 1
        if tries > 100 * spec.samples:
            raise InputError("could not draw enough samples away from the diagonal")
        zs = random_configuration(rng, spec.n, 2, spec.scale).as_complex()
        v = rng.normal(size=spec.n) + 1j * rng.normal(size=spec.n)
        v /= np.linalg.norm(v)
        if min_gap(zs) <= spec.diagonal_gap + 2 * max(spec.radius, spec.step):
            continue
        produced += 1
        yield zs, v


def psh_check(f: LiftFunction, spec: DiskSampleSpec, tol: float = 1e-8,
              samples=None) -> PshReport:
    """Sub-mean-value and Laplacian test of f along random complex lines."""
    means, laps, fails = [], [], []
    theta = 2 * np.pi * np.arange(spec.circle_points) / spec.circle_points
    circle = np.exp(1j * theta)
    h = spec.step
    for i, (z, v) in enumerate(samples if samples is not None else disk_samples(spec)):
        f0 = f(z)
        avg = float(np.mean([f(z + spec.radius * u * v) for u in circle]))
        lap = (f(z + h * v) + f(z - h * v) + f(z + 1j * h * v) + f(z - 1j * h * v) - 4 * f0) / h**2
        means.append(avg - f0)
        laps.append(float(lap))
        if avg - f0 < -tol or lap < -tol:
            fails.append({"sample": i, "mean_margin": avg - f0, "laplacian": float(lap),
                          "point": [[float(w.real), float(w.imag)] for w in z]})
    return PshReport(not fails and bool(means), means, laps, fails, 0)


# cm-standard and adapted structure ---------------------------------------

@dataclass
class SplitReport:
    passed: bool
    max_mixed: float
    max_cm_error: float
    checked: int
    skipped: list[str]

    def to_json(self) -> dict:
        return {"passed": self.passed, "max_mixed": self.max_mixed,
                "max_cm_error": self.max_cm_error, "checked": self.checked,
                "skipped": self.skipped}


def real_groups(zs: np.ndarray, tau: Sequence[int], rule: ClusteringRule) -> list[np.ndarray] | None:
    """Index groups of ``zs`` forming an ordered cluster decomposition of type ``tau`` of Re(z)."""
    if sum(tau) != zs.size:
        return None
    order = np.argsort(zs.real, kind="stable")
    groups, start = [], 0
    for size in tau:
        groups.append(order[start:start + size])
        start += size
    xs = zs.real
    if len(set(xs.tolist())) != xs.size:
        return None
    parent = Configuration.from_points(xs.tolist(), dim=1)
    index = {p[0]: i for i, p in enumerate(parent.points)}
    blocks = tuple(frozenset(index[float(xs[j])] for j in g) for g in groups)
    try:
        ClusterDecomposition(parent, blocks, rule)
    except InputError:
        return None
    return groups


def _group_moves(zs, groups, rule, rng, internal: bool, scale: float):
    """Rigid shifts of whole groups (cm move) or center-fixing moves inside groups."""
    out = np.zeros_like(zs)
    xs = zs.real
    for g in groups:
        if internal:
            if g.size < 2:
                continue
            step = rng.normal(size=g.size) + 1j * rng.normal(size=g.size)
            step -= step.mean()
            spread = np.ptp(xs[g]) if g.size > 1 else 1.0
            out[g] = scale * (spread * step.real + 1j * step.imag)
        else:
            out[g] = scale * (rng.normal() * rule.r[0] + 1j * rng.normal())
    return out


def _in_stratum(zs, tau, rule):
    return real_groups(zs, tau, rule) is not None


def cm_standard_check(f: LiftFunction, tau: Sequence[int], samples: Sequence[np.ndarray],
                      rule: ClusteringRule, tol: float = 1e-9,
                      cm_part: Callable[[np.ndarray, np.ndarray], float] | None = None,
                      seed: int = 0, moves: int = 3) -> SplitReport:
    """Test f = f_cm + f_int on the preimage of a real cluster stratum.

    The groups are the consecutive (by real part) blocks of sizes ``tau``.
    Rigid complex shifts of whole groups change only the cm coordinates and
    center-fixing moves inside groups change only the internal ones; their
    mixed second difference must vanish.  If ``cm_part`` is given, the change
    under a cm move must match the change of ``cm_part(centers, sizes)``.
    """
    rng = np.random.default_rng(seed)
    worst_mixed = worst_cm = 0.0
    checked, skipped = 0, []
    sizes = np.asarray(tau, dtype=float)
    for i, z in enumerate(samples):
        z = np.asarray(z, dtype=complex)
        groups = real_groups(z, tau, rule)
        if groups is None:
            skipped.append(f"sample {i}: not in the stratum {tuple(tau)}")
            continue
        for _ in range(moves):
            for scale in (0.1, 0.01, 0.001):
                dc = _group_moves(z, groups, rule, rng, internal=False, scale=scale)
                di = _group_moves(z, groups, rule, rng, internal=True, scale=scale)
                cands = (z + dc, z + di, z + dc + di)
                if all(_in_stratum(c, tau, rule) for c in cands):
                    break
            else:
                skipped.append(f"sample {i}: moves leave the stratum")
                continue
            f0, fc, fi, fci = f(z), f(cands[0]), f(cands[1]), f(cands[2])
            size = max(1.0, abs(f0), abs(fc), abs(fi), abs(fci))
            worst_mixed = max(worst_mixed, abs(fci - fc - fi + f0) / size)
            if cm_part is not None:
                cen0 = np.array([z[g].mean() for g in groups])
                cen1 = np.array([cands[0][g].mean() for g in groups])
                expect = cm_part(cen1, sizes) - cm_part(cen0, sizes)
                worst_cm = max(worst_cm, abs((fc - f0) - expect) / size)
            checked += 1
    ok = checked > 0 and worst_mixed <= tol and worst_cm <= tol
    return SplitReport(ok, worst_mixed, worst_cm, checked, skipped)


def im_squared_cm_part(centers: np.ndarray, sizes: np.ndarray) -> float:
    return float(np.sum(sizes * centers.imag**2))


@dataclass(frozen=True)
class StripGluing:
    """Synthetic gluing in C: the strip region is the band b < Re z < c.

    Several strips are modeled as copies of the band at imaginary offsets
    ``spacing * alpha``.
    """

    strips: int = 1
    spacing: float = 1e3

    def __post_init__(self):
        if self.strips < 1:
            raise InputError("need at least one strip")


def _window_sample(rng, window, split, gluing: StripGluing, spread: float):
    a, b, c, d = window
    l, k, r = split
    left = a - spread * rng.random(l) - 1e-9 - 1j * spread * rng.normal(size=l)
    right = d + spread * rng.random(r) + 1e-9 + 1j * spread * rng.normal(size=r)
    alpha = rng.integers(gluing.strips, size=k)
    mid = rng.uniform(b, c, size=k) + 1j * (gluing.spacing * alpha + (c - b) * rng.normal(size=k))
    return np.concatenate([left, mid, right])


def adapted_check(f: LiftFunction, gluing: StripGluing, window: Sequence[float],
                  split: Sequence[int], rule: ClusteringRule, samples: int = 50,
                  seed: int = 0, tol: float = 1e-9, spread: float = 1.0,
                  enforce_gaps: bool = True) -> dict:
    """Additivity of f across left / strip / right groups of a windowed sample."""
    a, b, c, d = window
    if not a < b < c < d:
        raise InputError("window must satisfy a < b < c < d")
    n = sum(split)
    gap = 2 * rule.r[min(n, rule.N) - 1]
    if enforce_gaps and not (b - a > gap and d - c > gap):
        raise InputError(f"window gaps must exceed 2 r_n = {gap}")
    rng = np.random.default_rng(seed)
    l, k, r = split
    groups = [np.arange(0, l), np.arange(l, l + k), np.arange(l + k, n)]
    worst = 0.0
    strip_samples = []
    for _ in range(samples):
        z = _window_sample(rng, window, split, gluing, spread)
        fresh = _window_sample(rng, window, split, gluing, spread)
        base = f(z)
        for p in range(3):
            for q in range(p + 1, 3):
                zp, zq, zpq = z.copy(), z.copy(), z.copy()
                zp[groups[p]] = fresh[groups[p]]
                zq[groups[q]] = fresh[groups[q]]
                zpq[groups[p]] = fresh[groups[p]]
                zpq[groups[q]] = fresh[groups[q]]
                vals = (f(zpq), f(zp), f(zq))
                size = max(1.0, abs(base), *map(abs, vals))
                worst = max(worst, abs(vals[0] - vals[1] - vals[2] + base) / size)
        strip_samples.append(z)
    strip_report = None
    if k:
        # cm-standardness of the strip factor with the outer groups frozen
        z0 = strip_samples[0]

        def strip_f(w, z0=z0):
            full = z0.copy()
            full[groups[1]] = w
            return f(full)

        mids = [s[groups[1]] for s in strip_samples]
        tau = _real_type(mids[0], rule)
        strip_report = cm_standard_check(strip_f, tau, [m for m in mids if _real_type(m, rule) == tau],
                                         rule, tol=tol, seed=seed)
    ok = worst <= tol and (strip_report is None or strip_report.passed)
    return {"passed": ok, "max_mixed": worst,
            "strip": None if strip_report is None else strip_report.to_json()}


def _real_type(zs: np.ndarray, rule: ClusteringRule) -> tuple[int, ...]:
    """Ordered sizes of the finest cluster decomposition of Re(z)."""
    xs = Configuration.from_points(zs.real.tolist(), dim=1)
    dec = finest_decomposition(xs, rule)
    return tuple(p.n for p in sorted(dec.parts, key=lambda p: p.points[0]))


def adapted_sweep(f: LiftFunction, gluing: StripGluing, split: Sequence[int],
                  rule: ClusteringRule, gaps: Sequence[float], samples: int = 20,
                  seed: int = 0) -> dict:
    """Additivity defect for windows (-g, 0, g, 2g) with samples spread at scale g.

    The window precondition is ignored, so small g lets clusters straddle the
    window edges.
    """
    out = []
    for g in gaps:
        window = (-g, 0.0, g, 2 * g)
        rep = adapted_check(f, gluing, window, split, rule, samples=samples, seed=seed,
                            tol=float("inf"), spread=g, enforce_gaps=False)
        out.append(rep["max_mixed"])
    monotone = all(y <= x + 1e-12 for x, y in zip(out, out[1:]))
    beyond = None
    for g, res in zip(reversed(list(gaps)), reversed(out)):
        if res > 1e-12:
            break
        beyond = g
    return {"gaps": list(gaps), "residuals": out, "monotone": monotone,
            "vanishes_beyond": beyond}


# displaceability ------------------------------------------------------------

def displaceability_potential(config, n_stops: int) -> tuple[float, float]:
    """|W| and the gradient norm of W(z) = sum z_i^n_stops in lifted coordinates."""
    if n_stops < 1:
        raise InputError("n_stops must be >= 1")
    zs = _lift(config)
    w = np.sum(zs**n_stops)
    grad = n_stops * zs ** (n_stops - 1)
    return float(abs(w)), float(np.linalg.norm(grad))


def cubic_two_point(A: complex, B: complex) -> tuple[complex, tuple[complex, complex]]:
    """W = z1^3 + z2^3 in the coordinates A = z1 + z2, B = z1 z2, and its gradient."""
    return A**3 - 3 * A * B, (3 * A**2 - 3 * B, -3 * A)
