"""Numerical sectoriality surrogates on Sym^n(C) = Sym^n(T*R).

A lift is a point of C^n read as (x, p) = (Re, Im).  The smoothed cover
function rho~ depends on x only; the witness is I~ = p . grad rho~, whose bracket
with rho~ is |grad rho~|^2.  All derivatives are central differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .boxcover import BoxParams, rho_smoothed
from .config import InputError
from .regmax import SMOOTH_BUMP, Bump

PhaseFunction = Callable[[np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class WitnessSpec:
    params: BoxParams
    k: int
    h: float = 1e-5
    bump: Bump = field(default=SMOOTH_BUMP, compare=False)

    def __post_init__(self):
        if not 1e-7 <= self.h <= 1e-3:
            raise InputError("finite-difference step must lie in [1e-7, 1e-3]")
        if not 0 <= self.k <= self.params.n:
            raise InputError(f"cut index {self.k} out of range 0..{self.params.n}")
        if not self.params.delta > 0:
            raise InputError("witness needs smoothing delta > 0")

    @property
    def n(self) -> int:
        return self.params.n

    def rho(self, x: np.ndarray) -> float:
        return rho_smoothed(np.sort(np.asarray(x, dtype=float)), self.params, self.k, self.bump)


def _split(z) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return z.real.astype(float), z.imag.astype(float)
    return z.astype(float), np.zeros(z.shape)


def grad(f: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (f(x + e) - f(x - e)) / (2 * h)
    return out


def rho_grad(spec: WitnessSpec, x: np.ndarray) -> np.ndarray:
    return grad(spec.rho, x, spec.h)


def witness_I(z, spec: WitnessSpec) -> float:
    x, p = _split(z)
    return float(p @ rho_grad(spec, x))


def _phase_grad(f: PhaseFunction, x, p, h):
    gx = grad(lambda y: f(y, p), x, h)
    gp = grad(lambda q: f(x, q), p, h)
    return gx, gp


def poisson_bracket(f: PhaseFunction, g: PhaseFunction, x, p, h: float) -> float:
    """{f, g} = sum_i df/dx_i dg/dp_i - df/dp_i dg/dx_i."""
    fx, fp = _phase_grad(f, x, p, h)
    gx, gp = _phase_grad(g, x, p, h)
    return float(fx @ gp - fp @ gx)


def _rho_phase(spec: WitnessSpec) -> PhaseFunction:
    return lambda x, p: spec.rho(x)


def _witness_phase(spec: WitnessSpec) -> PhaseFunction:
    return lambda x, p: float(p @ rho_grad(spec, x))


def min_gap(x: np.ndarray) -> float:
    xs = np.sort(np.asarray(x, dtype=float))
    return float(np.min(np.diff(xs))) if xs.size > 1 else float("inf")


# sampling ---------------------------------------------------------------------

@dataclass
class SampleSet:
    points: list[np.ndarray]
    notes: list[str]


def _interior_start(spec: WitnessSpec, rng: np.random.Generator) -> np.ndarray | None:
    """Random configuration with k points left of a_k and rho~ < 0."""
    n, k, a, b = spec.n, spec.k, spec.params.a[spec.k], spec.params.b
    left = a - (n + 1) * b - rng.uniform(0, 1.5, k)
    right = a + (n + 1) * b + rng.uniform(0, 1.5, n - k)
    x = np.concatenate([left, right])
    return x if spec.rho(x) < 0 else None


def boundary_samples(spec: WitnessSpec, count: int, seed: int = 0,
                     gap: float = 1e-3, max_step: float = 4.0) -> SampleSet:
    """Points of {rho~ = 0} found by bracketing along random rays from the inside."""
    rng = np.random.default_rng(seed)
    pts, notes = [], []
    tries = 0
    while len(pts) < count and tries < 20 * count:
        tries += 1
        x0 = _interior_start(spec, rng)
        if x0 is None:
            continue
        v = rng.normal(size=spec.n)
        v /= np.linalg.norm(v)
        g = lambda lam: spec.rho(x0 + lam * v)
        lam = 0.25
        while lam < max_step and g(lam) < 0:
            lam *= 2
        if g(lam) < 0:
            notes.append(f"ray {tries}: no sign change up to {max_step}")
            continue
        root = brentq(g, 0.0, lam, xtol=1e-14, rtol=1e-14)
        x = x0 + root * v
        if min_gap(x) < gap:
            notes.append(f"ray {tries}: root within {gap} of the diagonal")
            continue
        pts.append(x + 1j * rng.normal(size=spec.n))
    return SampleSet(pts, notes)


def _assign_points(cuts: Sequence[int]) -> list[tuple[int, int]]:
    """For each cut, the sorted index of the point whose singleton term is made active, and its side."""
    used, out = set(), []
    for k in cuts:
        if k >= 1 and k - 1 not in used:
            out.append((k - 1, -1))
            used.add(k - 1)
        else:
            out.append((k, +1))
            used.add(k)
    return out


def _joint_start(specs: Sequence[WitnessSpec], rng) -> np.ndarray:
    params = specs[0].params
    n, a, b = params.n, params.a, params.b
    cuts = [s.k for s in specs]
    fixed = {}
    for (idx, side), k in zip(_assign_points(cuts), cuts):
        fixed[idx] = a[k] + side * b + rng.uniform(-0.2, 0.2) * b
    # one point per gap between consecutive cuts, at the middle unless it is fixed
    mid = (np.asarray(a[:-1]) + np.asarray(a[1:])) / 2
    x = mid + rng.uniform(-0.5, 0.5, n) * b
    for idx, val in fixed.items():
        x[idx] = val
    return x


def newton_joint(specs: Sequence[WitnessSpec], x0: np.ndarray, tol: float = 1e-12,
                 maxiter: int = 50) -> tuple[np.ndarray, bool]:
    """Gauss-Newton (least-norm steps) for rho~_1 = ... = rho~_r = 0."""
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(maxiter):
        F = np.array([s.rho(x) for s in specs])
        if np.max(np.abs(F)) <= tol:
            return x, True
        J = np.array([rho_grad(s, x) for s in specs])
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        x = x + step
    F = np.array([s.rho(x) for s in specs])
    return x, bool(np.max(np.abs(F)) <= tol)


def _check_specs(specs: Sequence[WitnessSpec]):
    if not specs:
        raise InputError("need at least one witness spec")
    if any(s.params != specs[0].params for s in specs):
        raise InputError("witness specs must share the cut data")
    if len(specs) > specs[0].n:
        raise InputError("more cuts than points")


def joint_boundary_samples(specs: Sequence[WitnessSpec], count: int, seed: int = 0,
                           gap: float = 1e-3) -> SampleSet:
    _check_specs(specs)
    rng = np.random.default_rng(seed)
    pts, notes = [], []
    tries = 0
    while len(pts) < count and tries < 5 * count:
        tries += 1
        x, ok = newton_joint(specs, _joint_start(specs, rng))
        if not ok:
            notes.append(f"start {tries}: Newton did not converge")
            continue
        if min_gap(x) < gap:
            notes.append(f"start {tries}: solution within {gap} of the diagonal")
            continue
        pts.append(x + 1j * rng.normal(size=x.size))
    return SampleSet(pts, notes)


# checks -----------------------------------------------------------------------

@dataclass
class CheckReport:
    status: str
    value: float
    values: list[float]
    notes: list[str]

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_json(self) -> dict:
        return {"status": self.status, "min": self.value, "samples": len(self.values),
                "notes": self.notes}


def _report(values, tol, notes) -> CheckReport:
    if not values:
        return CheckReport("INCONCLUSIVE", float("nan"), [], notes)
    m = float(min(values))
    return CheckReport("PASS" if m >= tol else "FAIL", m, list(values), notes)


def bracket_value(spec: WitnessSpec, z) -> float:
    x, p = _split(z)
    return poisson_bracket(_rho_phase(spec), _witness_phase(spec), x, p, spec.h)


def bracket_check(spec: WitnessSpec, samples: Sequence, tol: float = 1e-6,
                  notes: Sequence[str] = ()) -> CheckReport:
    """min over samples of {rho~ o Re, I~}; PASS iff it is at least ``tol``."""
    vals = [bracket_value(spec, z) for z in samples]
    return _report(vals, tol, list(notes))


def gradient_matrix(specs: Sequence[WitnessSpec], z) -> np.ndarray:
    """Rows d(rho~_i o Re) in the coordinates (x, p); the p-block is zero."""
    x, _ = _split(z)
    rows = [np.concatenate([rho_grad(s, x), np.zeros(x.size)]) for s in specs]
    return np.array(rows)


def transversality_check(specs: Sequence[WitnessSpec], samples: Sequence, tol: float = 1e-6,
                         notes: Sequence[str] = ()) -> CheckReport:
    _check_specs(specs)
    vals = [float(np.linalg.svd(gradient_matrix(specs, z), compute_uv=False)[-1])
            for z in samples]
    return _report(vals, tol, list(notes))


def commuting_bracket_report(specs: Sequence[WitnessSpec], samples: Sequence) -> dict:
    """max |{I~_i, I~_j}| over samples for each pair i < j (reported, not asserted)."""
    _check_specs(specs)
    out = {}
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            fi, fj = _witness_phase(specs[i]), _witness_phase(specs[j])
            h = max(specs[i].h, specs[j].h, 1e-4)
            vals = [abs(poisson_bracket(fi, fj, *_split(z), h)) for z in samples]
            out[f"{specs[i].k},{specs[j].k}"] = max(vals) if vals else float("nan")
    return {"max_brackets": out, "samples": len(samples)}
