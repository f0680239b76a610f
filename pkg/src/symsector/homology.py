"""Rational homology of symmetric powers of surfaces and its gluing along strips.

A surface component homotopic to a wedge of g circles contributes the free
graded-commutative algebra Q[x] (x) Lambda[theta_1..theta_g]; its weight-n
part is H_*(Sym^n).  Strips act by multiplication with the point class x of
the component they attach to.  The derived tensor product over the strip
algebra Q[t_1..t_c] is computed with a Koszul complex, graded by (n, q).
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Sequence

from . import linalg as la
from .config import InputError

BigradedDims = dict[tuple[int, int], int]


@dataclass(frozen=True)
class SurfaceDescriptor:
    """Components given by their loop counts."""

    genera: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "genera", tuple(int(g) for g in self.genera))
        if not self.genera:
            raise InputError("a surface needs at least one component")
        if any(g < 0 for g in self.genera):
            raise InputError("loop counts must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "SurfaceDescriptor":
        """'g=0', 'g=1,2' or '0,2'."""
        body = text.split("=", 1)[1] if "=" in text else text
        try:
            return cls(tuple(int(x) for x in body.split(",") if x.strip()))
        except ValueError as exc:
            raise InputError(f"bad surface descriptor {text!r}") from exc


# the oracle ----------------------------------------------------------------

def _convolve(a: BigradedDims, b: BigradedDims, nmax: int) -> BigradedDims:
    out: BigradedDims = defaultdict(int)
    for (n1, q1), x in a.items():
        for (n2, q2), y in b.items():
            if n1 + n2 <= nmax:
                out[(n1 + n2, q1 + q2)] += x * y
    return dict(out)


def _wedge_dims(g: int, nmax: int) -> BigradedDims:
    return {(n, q): comb(g, q) for n in range(nmax + 1) for q in range(min(g, n) + 1)}


def sym_homology_oracle(surface: SurfaceDescriptor, nmax: int) -> BigradedDims:
    """dim H_q(Sym^n) for n <= nmax: coefficients of prod_i (1 + y w)^{g_i} / (1 - w)."""
    if nmax < 0:
        raise InputError("need nmax >= 0")
    out = {(0, 0): 1}
    for g in surface.genera:
        out = _convolve(out, _wedge_dims(g, nmax), nmax)
    return {k: v for k, v in out.items() if v}


def row(dims: BigradedDims, n: int) -> list[int]:
    qs = [q for (m, q) in dims if m == n]
    return [dims.get((n, q), 0) for q in range(max(qs) + 1)] if qs else [0]


# strip modules ---------------------------------------------------------------

Monomial = tuple[tuple[int, ...], tuple[tuple[int, int], ...]]   # (x exponents, theta labels)


def _monomials(surface: SurfaceDescriptor, n: int, q: int) -> list[Monomial]:
    thetas = [(i, j) for i, g in enumerate(surface.genera) for j in range(g)]
    k = len(surface.genera)
    out = []
    for odd in itertools.combinations(thetas, q):
        rest = n - q
        if rest < 0:
            continue
        for bars in itertools.combinations(range(rest + k - 1), k - 1):
            cuts = (-1,) + bars + (rest + k - 1,)
            exps = tuple(cuts[i + 1] - cuts[i] - 1 for i in range(k))
            out.append((exps, odd))
    return out


@dataclass
class StripModule:
    """H_*Sym of one side with the commuting actions of the c strips."""

    surface: SurfaceDescriptor
    ends: tuple[int, ...]
    nmax: int

    def __post_init__(self):
        self.ends = tuple(int(e) for e in self.ends)
        if any(not 0 <= e < len(self.surface.genera) for e in self.ends):
            raise InputError("strip attached to a missing component")
        if self.nmax < 0:
            raise InputError("need nmax >= 0")

    @property
    def strips(self) -> int:
        return len(self.ends)

    @cached_property
    def _bases(self) -> dict[tuple[int, int], list[Monomial]]:
        out = {}
        for n in range(self.nmax + 1):
            for q in range(n + 1):
                b = _monomials(self.surface, n, q)
                if b:
                    out[(n, q)] = b
        return out

    @cached_property
    def _index(self) -> dict[Monomial, int]:
        return {m: i for b in self._bases.values() for i, m in enumerate(b)}

    def basis(self, n: int, q: int) -> list[Monomial]:
        return self._bases.get((n, q), [])

    def dims(self) -> BigradedDims:
        return {k: len(v) for k, v in self._bases.items()}

    def act(self, alpha: int, m: Monomial) -> Monomial:
        exps, odd = m
        e = list(exps)
        e[self.ends[alpha]] += 1
        return (tuple(e), odd)

    def index(self, m: Monomial) -> int:
        return self._index[m]

    def action_matrix(self, alpha: int, n: int, q: int) -> la.Mat:
        """t_alpha: (n, q) -> (n + 1, q)."""
        src, dst = self.basis(n, q), self.basis(n + 1, q)
        if n + 1 > self.nmax:
            raise InputError("action leaves the computed range")
        return la.from_entries((len(dst), len(src)),
                               ((self.index(self.act(alpha, m)), i, 1) for i, m in enumerate(src)))

    def commutes(self) -> bool:
        for n in range(self.nmax - 1):
            for q in range(n + 1):
                for a, b in itertools.combinations(range(self.strips), 2):
                    ab = la.matmul(self.action_matrix(a, n + 1, q), self.action_matrix(b, n, q))
                    ba = la.matmul(self.action_matrix(b, n + 1, q), self.action_matrix(a, n, q))
                    if not la.equal(ab, ba):
                        return False
        return True


def build_strip_module(surface: SurfaceDescriptor, ends: Sequence[int], nmax: int) -> StripModule:
    return StripModule(surface, tuple(ends), nmax)


# derived tensor via Koszul --------------------------------------------------

def _koszul_basis(ML: StripModule, MR: StripModule, n: int, q: int) -> list[tuple]:
    c = ML.strips
    out = []
    for s in range(min(c, n, q) + 1):
        for S in itertools.combinations(range(c), s):
            for nl in range(n - s + 1):
                nr = n - s - nl
                for ql in range(min(nl, q - s) + 1):
                    qr = q - s - ql
                    if qr < 0 or qr > nr:
                        continue
                    for a in ML.basis(nl, ql):
                        for b in MR.basis(nr, qr):
                            out.append((a, b, S))
    return out


def _koszul_rank(ML, MR, n, q, bases) -> int:
    """Rank of d: K_(n, q) -> K_(n, q - 1)."""
    src = bases.get((n, q), [])
    dst = bases.get((n, q - 1), [])
    if not src or not dst:
        return 0
    pos = {x: i for i, x in enumerate(dst)}
    entries = []
    for j, (a, b, S) in enumerate(src):
        for k, alpha in enumerate(S):
            sign = -1 if k % 2 else 1
            rest = S[:k] + S[k + 1:]
            entries.append((pos[(ML.act(alpha, a), b, rest)], j, sign))
            entries.append((pos[(a, MR.act(alpha, b), rest)], j, -sign))
    return la.sparse_rank((len(dst), len(src)), entries)


def _check_pair(ML: StripModule, MR: StripModule):
    if ML.strips != MR.strips:
        raise InputError("modules over different numbers of strips")
    for M in (ML, MR):
        if not M.commutes():
            raise InputError("strip actions do not commute")


def derived_tensor(ML: StripModule, MR: StripModule, nmax: int | None = None) -> BigradedDims:
    """Homology of the Koszul complex of t_a (x) 1 - 1 (x) t_a on ML (x) MR."""
    _check_pair(ML, MR)
    nmax = min(ML.nmax, MR.nmax) if nmax is None else nmax
    if nmax > min(ML.nmax, MR.nmax):
        raise InputError("modules are not computed that far")
    out = {}
    for n in range(nmax + 1):
        bases = {(n, q): _koszul_basis(ML, MR, n, q) for q in range(n + 1)}
        ranks = {q: _koszul_rank(ML, MR, n, q, bases) for q in range(n + 2)}
        for q in range(n + 1):
            h = len(bases[(n, q)]) - ranks[q] - ranks[q + 1]
            if h:
                out[(n, q)] = h
    return out


# truncated bar complex cross-check -------------------------------------------

def _positive_monomials(c: int, w: int) -> list[tuple[int, ...]]:
    return [tuple(e) for e in itertools.product(range(w + 1), repeat=c) if sum(e) == w] if w else []


def _act_power(M: StripModule, e: tuple[int, ...], m: Monomial) -> Monomial:
    for alpha, k in enumerate(e):
        for _ in range(k):
            m = M.act(alpha, m)
    return m


def bar_tensor(ML: StripModule, MR: StripModule, nmax: int) -> BigradedDims:
    """Tor over Q[t_1..t_c] from the reduced bar complex ML (x) R+^{(x)k} (x) MR.

    Every reduced bar factor carries weight >= 1, so in weight n only bar
    degrees k <= n occur and the complex is finite.
    """
    _check_pair(ML, MR)
    c = ML.strips
    if nmax > min(ML.nmax, MR.nmax):
        raise InputError("modules are not computed that far")

    def cells(n, q):
        out = []
        for k in range(0, min(n, q) + 1 if c else 1):
            for ws in itertools.product(range(1, n + 1), repeat=k):
                rest = n - sum(ws)
                if rest < 0:
                    continue
                for factors in itertools.product(*[_positive_monomials(c, w) for w in ws]):
                    for nl in range(rest + 1):
                        for ql in range(q - k + 1):
                            for a in ML.basis(nl, ql):
                                for b in MR.basis(rest - nl, q - k - ql):
                                    out.append((a, factors, b))
        return out

    out = {}
    for n in range(nmax + 1):
        bases = {q: cells(n, q) for q in range(-1, n + 2)}
        ranks = {}
        for q in range(n + 2):
            src, dst = bases[q], bases[q - 1]
            if not src or not dst:
                ranks[q] = 0
                continue
            pos = {x: i for i, x in enumerate(dst)}
            entries = []
            for j, (a, fs, b) in enumerate(src):
                k = len(fs)
                entries.append((pos[(_act_power(ML, fs[0], a), fs[1:], b)], j, 1) if k else None)
                for i in range(k - 1):
                    merged = tuple(x + y for x, y in zip(fs[i], fs[i + 1]))
                    entries.append((pos[(a, fs[:i] + (merged,) + fs[i + 2:], b)], j, (-1) ** (i + 1)))
                if k:
                    entries.append((pos[(a, fs[:-1], _act_power(MR, fs[-1], b))], j, (-1) ** k))
            ranks[q] = la.sparse_rank((len(dst), len(src)), [e for e in entries if e])
        for q in range(n + 1):
            h = len(bases[q]) - ranks[q] - ranks[q + 1]
            if h:
                out[(n, q)] = h
    return out


# gluing ----------------------------------------------------------------------

@dataclass
class GluedSurface:
    genera: tuple[int, ...]            # one per connected component of the union
    euler: int

    @property
    def surface(self) -> SurfaceDescriptor:
        return SurfaceDescriptor(self.genera)


def glue(left: SurfaceDescriptor, right: SurfaceDescriptor, left_ends: Sequence[int],
         right_ends: Sequence[int]) -> GluedSurface:
    """Components and loop counts of the union, from the gluing graph.

    Vertices are the components of both sides, edges the strips; a glued
    component with vertex set V and edge set E has loop count sum g + |E| - |V| + 1.
    """
    if len(left_ends) != len(right_ends):
        raise InputError("each strip needs a left and a right end")
    nl = len(left.genera)
    verts = list(left.genera) + list(right.genera)
    if any(not 0 <= e < nl for e in left_ends) or any(not 0 <= e < len(right.genera) for e in right_ends):
        raise InputError("strip attached to a missing component")
    parent = list(range(len(verts)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    edges = [(l, nl + r) for l, r in zip(left_ends, right_ends)]
    for a, b in edges:
        parent[find(a)] = find(b)
    groups = defaultdict(list)
    for i in range(len(verts)):
        groups[find(i)].append(i)
    genera = []
    for root, vs in sorted(groups.items()):
        e = sum(1 for a, _ in edges if find(a) == root)
        genera.append(sum(verts[v] for v in vs) + e - len(vs) + 1)
    euler = sum(1 - g for g in verts) - len(edges)
    return GluedSurface(tuple(genera), euler)


@dataclass
class GluingReport:
    left: SurfaceDescriptor
    right: SurfaceDescriptor
    strips: int
    glued: GluedSurface
    computed: BigradedDims
    oracle: BigradedDims
    bar: BigradedDims | None = None
    mismatches: list[tuple[int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def table(self) -> list[tuple[int, int, int, int]]:
        keys = sorted(set(self.computed) | set(self.oracle))
        return [(n, q, self.computed.get((n, q), 0), self.oracle.get((n, q), 0)) for n, q in keys]

    def to_json(self) -> dict:
        return {"left": list(self.left.genera), "right": list(self.right.genera),
                "strips": self.strips, "glued_genera": list(self.glued.genera),
                "euler": self.glued.euler, "passed": self.passed,
                "table": [dict(n=n, q=q, computed=a, oracle=b) for n, q, a, b in self.table()],
                "mismatches": [list(m) for m in self.mismatches]}


def verify_gluing(left: SurfaceDescriptor, right: SurfaceDescriptor, nmax: int,
                  left_ends: Sequence[int] | None = None, right_ends: Sequence[int] | None = None,
                  strips: int | None = None, bar_nmax: int = -1) -> GluingReport:
    """Compare the derived tensor with the oracle of the glued surface for n <= nmax.

    Without explicit ends, ``strips`` strips all join component 0 to component 0.
    With ``bar_nmax`` >= 0 the reduced bar complex is computed up to that weight as well.
    """
    if left_ends is None:
        left_ends = (0,) * (strips or 0)
    if right_ends is None:
        right_ends = (0,) * (strips or 0)
    ML = build_strip_module(left, left_ends, nmax + 1)
    MR = build_strip_module(right, right_ends, nmax + 1)
    glued = glue(left, right, left_ends, right_ends)
    computed = derived_tensor(ML, MR, nmax)
    oracle = sym_homology_oracle(glued.surface, nmax)
    bad = sorted(k for k in set(computed) | set(oracle) if computed.get(k, 0) != oracle.get(k, 0))
    bar = None
    if bar_nmax >= 0:
        bar = bar_tensor(ML, MR, bar_nmax)
        want = {k: v for k, v in computed.items() if k[0] <= bar_nmax}
        bad += sorted(k for k in set(bar) | set(want) if bar.get(k, 0) != want.get(k, 0)
                      and k not in bad)
    return GluingReport(left, right, len(left_ends), glued, computed, oracle, bar, bad)


def euler_characteristic(dims: BigradedDims, n: int) -> int:
    return sum((-1) ** q * v for (m, q), v in dims.items() if m == n)


def k_theory_comparison(nmax: int = 4) -> list[dict]:
    """Graded ranks of the decategorified models next to total homology ranks (report only)."""
    from .catcomplex import algebra_dims, trinion_model

    cases = [("trinion", list(trinion_model().dims), SurfaceDescriptor((2,))),
             ("strip", algebra_dims(1), SurfaceDescriptor((0,))),
             ("two strips", algebra_dims(2), SurfaceDescriptor((0, 0)))]
    out = []
    for name, ranks, surface in cases:
        oracle = sym_homology_oracle(surface, nmax)
        totals = [sum(v for (m, _), v in oracle.items() if m == n) for n in range(nmax + 1)]
        ranks = [ranks[n] if n < len(ranks) else 0 for n in range(nmax + 1)]
        out.append({"case": name, "model_ranks": ranks, "homology_ranks": totals,
                    "bounded": all(a <= b for a, b in zip(ranks, totals))})
    return out
