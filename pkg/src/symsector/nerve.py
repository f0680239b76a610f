"""Bar and Cech diagram shapes, their matching, and colimits over finite posets.

Elements of the bar diagram in degree n are ordered compositions
(n_L, m_1, ..., m_k, n_R) of n with positive middle entries; arrows merge two
adjacent entries.  The Cech poset of the box cover is indexed by nonempty
sets of cut indices.  Homotopy colimits of vector-space valued diagrams are
computed exactly as the total complex of the simplicial replacement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Hashable, Iterable, Protocol, Sequence

import numpy as np

from . import linalg as la
from .boxcover import (
    BoxParams,
    factor_membership,
    intersection_as_refinement,
    product_split,
    random_line_configuration,
    refined_membership,
)
from .config import InputError, composition_to_cuts, cut_subsets


@dataclass(frozen=True)
class GluingDescriptor:
    """Sigma = Sigma_L u Sigma_R glued along ``strips`` copies of T*[-1, 1].

    Each side may have several components with given genera; strip i joins
    left component ``left_ends[i]`` to right component ``right_ends[i]``.
    """

    strips: int = 1
    left: str = "L"
    right: str = "R"
    left_genera: tuple[int, ...] = (0,)
    right_genera: tuple[int, ...] = (0,)
    left_ends: tuple[int, ...] | None = None
    right_ends: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.strips < 1:
            raise InputError("a gluing needs at least one strip")
        for name in ("left_ends", "right_ends"):
            ends = getattr(self, name)
            if ends is None:
                object.__setattr__(self, name, (0,) * self.strips)
            elif len(ends) != self.strips:
                raise InputError(f"{name} must name one component per strip")
        if any(not 0 <= e < len(self.left_genera) for e in self.left_ends) or \
                any(not 0 <= e < len(self.right_genera) for e in self.right_ends):
            raise InputError("strip end refers to a missing component")
        if any(g < 0 for g in self.left_genera + self.right_genera):
            raise InputError("genera must be nonnegative")


Arrow = tuple[Hashable, Hashable, str]


@dataclass
class DiagramOverPoset:
    """A finite poset given by its covering arrows (source above target), with labels.

    ``payload`` optionally maps elements to dimensions and ``maps`` covering
    arrows (source, target) to matrices payload(source) -> payload(target).
    """

    elements: list
    arrows: list[Arrow]
    labels: dict = field(default_factory=dict)
    payload: dict | None = None
    maps: dict | None = None

    def __post_init__(self):
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise InputError("repeated poset element")
        for s, t, _ in self.arrows:
            if s not in self._index or t not in self._index:
                raise InputError(f"arrow {s} -> {t} leaves the poset")
        self._below = None
        self._composites: dict = {}

    def __contains__(self, e) -> bool:
        return e in self._index

    def successors(self, e) -> list:
        return [t for s, t, _ in self.arrows if s == e]

    def below(self) -> dict:
        """Strictly smaller elements of each element (targets of composed arrows)."""
        if self._below is None:
            down = {e: set() for e in self.elements}
            for e in self._topological():
                for t in self.successors(e):
                    down[e] |= {t} | down[t]
            self._below = down
        return self._below

    def _topological(self) -> list:
        # elements ordered so that every arrow target comes first
        out, state = [], {}

        def visit(e):
            if state.get(e) == 1:
                raise InputError("arrows contain a cycle")
            if state.get(e) == 2:
                return
            state[e] = 1
            for t in self.successors(e):
                visit(t)
            state[e] = 2
            out.append(e)

        for e in self.elements:
            visit(e)
        return out

    def is_poset(self) -> bool:
        try:
            down = self.below()
        except InputError:
            return False
        return all(e not in down[e] for e in self.elements)

    def leq(self, a, b) -> bool:
        return a == b or a in self.below()[b]

    def restrict(self, keep: Iterable) -> "DiagramOverPoset":
        """Full subdiagram; arrows between kept elements through removed ones are composed."""
        keep = [e for e in self.elements if e in set(keep)]
        ks = set(keep)
        arrows, maps = [], {} if self.maps is not None else None
        down = self.below()
        for s in keep:
            for t in keep:
                if t in down[s] and not any(t in down[u] for u in down[s] & ks):
                    arrows.append((s, t, self._label(s, t)))
                    if maps is not None:
                        maps[(s, t)] = self.map_between(s, t)
        payload = None if self.payload is None else {e: self.payload[e] for e in keep}
        labels = {e: self.labels[e] for e in keep if e in self.labels}
        return DiagramOverPoset(keep, arrows, labels, payload, maps)

    def _label(self, s, t) -> str:
        for a, b, lab in self.arrows:
            if (a, b) == (s, t):
                return lab
        return "composite"

    def map_between(self, s, t) -> la.Mat:
        """The payload map for s >= t, composed along a chain of covering arrows."""
        if self.maps is None or self.payload is None:
            raise InputError("diagram has no payload maps")
        return self._compose(s, t)

    def _compose(self, s, t):
        if s == t:
            return la.eye(self.payload[s])
        if (s, t) in self.maps:
            return self.maps[(s, t)]
        if (s, t) in self._composites:
            return self._composites[(s, t)]
        down = self.below()
        for u in self.successors(s):
            if u == t or t in down[u]:
                m = la.matmul(self._compose(u, t), self.maps[(s, u)])
                self._composites[(s, t)] = m
                return m
        raise InputError(f"{t} is not below {s}")

    def commutes(self) -> bool:
        """Every pair of covering paths between two elements gives the same map."""
        if self.maps is None:
            return True
        down = self.below()

        @lru_cache(maxsize=None)
        def all_paths(s, t):
            if s == t:
                return (la.eye(self.payload[s]),)
            out = []
            for u in self.successors(s):
                if u == t or t in down[u]:
                    out.extend(la.matmul(m, self.maps[(s, u)]) for m in all_paths(u, t))
            return tuple(out)

        for s in self.elements:
            for t in down[s]:
                ms = all_paths(s, t)
                if any(not la.equal(m, ms[0]) for m in ms[1:]):
                    return False
        return True

    def to_dot(self, name: str = "diagram") -> str:
        ids = {e: f"v{i}" for i, e in enumerate(self.elements)}
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for e in self.elements:
            text = self.labels.get(e, str(e))
            if self.payload is not None:
                text += f"\\ndim {self.payload[e]}"
            lines.append(f'  {ids[e]} [label="{text}"];')
        for s, t, lab in self.arrows:
            lines.append(f'  {ids[s]} -> {ids[t]} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines)


# bar and Cech shapes -------------------------------------------------------

def bar_compositions(n: int) -> list[tuple[int, ...]]:
    """(n_L, m_1, ..., m_k, n_R) with n_L, n_R >= 0 and m_i >= 1 summing to n."""
    if n < 0:
        raise InputError("n must be nonnegative")
    out = []

    def middles(rest):
        yield ()
        for m in range(1, rest + 1):
            for tail in middles(rest - m):
                yield (m,) + tail

    for nl in range(n + 1):
        for mids in middles(n - nl):
            out.append((nl, *mids, n - nl - sum(mids)))
    return sorted(out, key=lambda c: (len(c), c))


def merge(comp: tuple[int, ...], i: int) -> tuple[int, ...]:
    """Merge entries i and i + 1."""
    return comp[:i] + (comp[i] + comp[i + 1],) + comp[i + 2:]


def _merge_kind(comp, i) -> str:
    if i == 0:
        return "act_L"
    if i + 1 == len(comp) - 1:
        return "act_R"
    return "mult_A"


def bar_arrows(comp: tuple[int, ...]) -> list[Arrow]:
    if len(comp) <= 2:
        return []
    return [(comp, merge(comp, i), _merge_kind(comp, i)) for i in range(len(comp) - 1)]


def _bar_label(comp, g: GluingDescriptor) -> str:
    mids = " x ".join(f"Sym^{m}(A)" for m in comp[1:-1])
    parts = [f"Sym^{comp[0]}({g.left})"] + ([mids] if mids else []) + [f"Sym^{comp[-1]}({g.right})"]
    return " x ".join(parts)


def strip_components(comp: Sequence[int], strips: int) -> int:
    """Connected components of the middle factors: points spread over the strips."""
    out = 1
    for m in comp[1:-1]:
        out *= comb(m + strips - 1, strips - 1)
    return out


def build_bar_degree(gluing: GluingDescriptor, n: int) -> DiagramOverPoset:
    comps = bar_compositions(n)
    arrows = [a for c in comps for a in bar_arrows(c)]
    labels = {c: _bar_label(c, gluing) for c in comps}
    return DiagramOverPoset(comps, arrows, labels)


def build_cech_poset(n: int) -> DiagramOverPoset:
    """Nonempty sets S of cut indices (the intersection of the U_{k, n-k}, k in S).

    Larger sets give smaller intersections, so arrows go S -> S minus one cut.
    """
    if n < 0:
        raise InputError("n must be nonnegative")
    subsets = [frozenset(s) for s in cut_subsets(n)]
    arrows = [(s, s - {k}, f"omit U_{k},{n - k}") for s in subsets if len(s) > 1 for k in sorted(s)]
    labels = {s: " n ".join(f"U_{k},{n - k}" for k in sorted(s)) for s in subsets}
    return DiagramOverPoset(subsets, arrows, labels)


def cech_arrow_count(n: int) -> int:
    return sum(comb(n + 1, s) * s for s in range(2, n + 2))


@dataclass
class MatchCertificate:
    n: int
    strips: int
    passed: bool
    matches: dict
    arrow_counts: tuple[int, int]
    factor_evidence: dict
    failures: list[str]

    def to_json(self) -> dict:
        return {"n": self.n, "strips": self.strips, "passed": self.passed,
                "elements": len(self.matches),
                "arrows": {"cech": self.arrow_counts[0], "bar": self.arrow_counts[1]},
                "matches": {",".join(map(str, sorted(s))): list(c) for s, c in self.matches.items()},
                "factor_evidence": {str(list(k)): v for k, v in self.factor_evidence.items()},
                "failures": self.failures}


def _factor_evidence(comp, params: BoxParams, rng, samples: int) -> dict:
    """Shapes of the product factors and agreement of factorwise membership on samples."""
    factors = product_split(comp, params)
    shapes = [f.composition for f in factors]
    agree = hits = 0
    for _ in range(samples):
        xs = random_line_configuration(rng, params.n)
        whole = refined_membership(xs, params, comp)
        agree += whole == factor_membership(xs, params, comp)
        hits += whole
    return {"factors": [list(s) for s in shapes], "samples": samples, "agree": agree,
            "members": hits}


def match_bar_cech(gluing: GluingDescriptor, n: int, samples: int = 20,
                   seed: int = 0) -> MatchCertificate:
    """Bijection between the Cech poset and the bar diagram compatible with arrows."""
    bar = build_bar_degree(gluing, n)
    cech = build_cech_poset(n)
    failures = []
    matches = {s: intersection_as_refinement(sorted(s), n) for s in cech.elements}
    image = list(matches.values())
    if len(set(image)) != len(image):
        failures.append("refinement map is not injective")
    if set(image) != set(bar.elements):
        missing = set(bar.elements) - set(image)
        extra = set(image) - set(bar.elements)
        failures.append(f"element mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
    cech_arrows = {(matches[s], matches[t]) for s, t, _ in cech.arrows}
    bar_arrow_set = {(s, t) for s, t, _ in bar.arrows}
    if cech_arrows != bar_arrow_set:
        failures.append(f"arrow mismatch: {sorted(cech_arrows ^ bar_arrow_set)}")
    if n == 0:
        evidence = {}
    else:
        params = BoxParams.uniform(n)
        rng = np.random.default_rng(seed)
        evidence = {}
        for comp in bar.elements:
            ev = _factor_evidence(comp, params, rng, samples)
            ev["components"] = strip_components(comp, gluing.strips)
            shapes = [tuple(f) for f in ev["factors"]]
            expected = [(comp[0], 0)] + [(0, m, 0) for m in comp[1:-1]] + [(0, comp[-1])]
            if shapes != expected:
                failures.append(f"{comp}: factor shapes {shapes}")
            if ev["agree"] != samples:
                failures.append(f"{comp}: factorwise membership disagrees")
            evidence[comp] = ev
    counts = (len(cech.arrows), len(bar.arrows))
    return MatchCertificate(n, gluing.strips, not failures, matches, counts, evidence, failures)


# barycentric diagram with payloads ------------------------------------------

class BarFactors(Protocol):
    """Weight-graded X, A, Y with the maps that merge adjacent tensor factors."""

    def dim(self, role: str, weight: int) -> int: ...

    def merge_map(self, left: tuple[str, int], right: tuple[str, int]) -> la.Mat:
        """Matrix left_space (x) right_space -> merged space (role of the outer factor)."""
        ...


def _roles(comp) -> list[tuple[str, int]]:
    return [("X", comp[0])] + [("A", m) for m in comp[1:-1]] + [("Y", comp[-1])]


def _payload_dim(comp, factors: BarFactors) -> int:
    d = 1
    for role, w in _roles(comp):
        d *= factors.dim(role, w)
    return d


def _merge_matrix(comp, i, factors: BarFactors) -> la.Mat:
    roles = _roles(comp)
    before = _payload_dim_roles(roles[:i], factors)
    after = _payload_dim_roles(roles[i + 2:], factors)
    core = factors.merge_map(roles[i], roles[i + 1])
    return la.kron(la.kron(_eye(before), core), _eye(after))


def _eye(n: int) -> la.Mat:
    return la.eye(n) if n else la.zeros(0, 0)


def _payload_dim_roles(roles, factors) -> int:
    d = 1
    for role, w in roles:
        d *= factors.dim(role, w)
    return d


def barycentric_diagram(n: int, factors: BarFactors | None = None,
                        dims: dict[str, Sequence[int]] | None = None) -> DiagramOverPoset:
    """Delta^n(X|A|Y): vertices (n_X, m_1, ..., n_Y), arrows merging adjacent entries.

    ``factors`` attaches payload spaces and merge maps; ``dims`` (weight-graded
    dimensions of X, A, Y) attaches dimensions only.
    """
    comps = bar_compositions(n)
    arrows = [(s, t, lab.replace("_L", "_X").replace("_R", "_Y")) for c in comps
              for s, t, lab in bar_arrows(c)]
    labels = {c: "(" + "|".join(map(str, c)) + ")" for c in comps}
    if factors is None and dims is None:
        return DiagramOverPoset(comps, arrows, labels)
    if factors is None:
        def get(role, w):
            seq = dims[role]
            return seq[w] if w < len(seq) else 0
        payload = {c: int(np.prod([get(r, w) for r, w in _roles(c)])) for c in comps}
        return DiagramOverPoset(comps, arrows, labels, payload)
    payload = {c: _payload_dim(c, factors) for c in comps}
    maps = {}
    for c in comps:
        for i in range(len(c) - 1) if len(c) > 2 else ():
            maps[(c, merge(c, i))] = _merge_matrix(c, i, factors)
    return DiagramOverPoset(comps, arrows, labels, payload, maps)


def corner_vertex(n: int, j: int) -> tuple[int, int]:
    return (j, n - j)


# homotopy colimits -------------------------------------------------------------

@dataclass
class HocolimComplex:
    """Total complex of the simplicial replacement, homological degrees 0..depth."""

    chains: list[list[tuple]]
    dims: list[int]
    d: list[la.Mat]            # d[k]: degree k+1 -> degree k

    def homology(self) -> list[int]:
        out = []
        for k, dim in enumerate(self.dims):
            out_rank = la.rank(self.d[k - 1]) if k >= 1 else 0
            in_rank = la.rank(self.d[k]) if k < len(self.d) else 0
            out.append(dim - out_rank - in_rank)
        return out


def _chains(diagram: DiagramOverPoset) -> list[list[tuple]]:
    """Chains p_0 > p_1 > ... > p_k by length k."""
    down = diagram.below()
    by_len = [[(e,) for e in diagram.elements]]
    while True:
        nxt = [c + (t,) for c in by_len[-1] for t in diagram.elements if t in down[c[-1]]]
        if not nxt:
            return by_len
        by_len.append(nxt)


def hocolim(diagram: DiagramOverPoset) -> HocolimComplex:
    if diagram.payload is None or diagram.maps is None:
        raise InputError("hocolim needs payload spaces and maps")
    chains = _chains(diagram)
    offsets, dims = [], []
    for level in chains:
        off, pos = {}, 0
        for c in level:
            off[c] = pos
            pos += diagram.payload[c[0]]
        offsets.append(off)
        dims.append(pos)
    ds = []
    for k in range(1, len(chains)):
        entries = []
        for c in chains[k]:
            src = offsets[k][c]
            size = diagram.payload[c[0]]
            for i in range(k + 1):
                face = c[:i] + c[i + 1:]
                sign = -1 if i % 2 else 1
                dst = offsets[k - 1][face]
                if i == 0:
                    m = diagram.map_between(c[0], c[1])
                    entries.extend((dst + r, src + col, sign * v) for r, col, v in la.entries(m))
                else:
                    entries.extend((dst + r, src + r, sign) for r in range(size))
        ds.append(la.from_entries((dims[k - 1], dims[k]), entries))
    return HocolimComplex(chains, dims, ds)


def augmentation(diagram: DiagramOverPoset, target_dim: int,
                 to_target: Callable[[Hashable], la.Mat]) -> la.Mat:
    """Degree-0 map of the hocolim to a target space, from maps payload(p) -> target."""
    entries, pos = [], 0
    for (e,) in _chains(diagram)[0]:
        m = to_target(e)
        entries.extend((r, pos + c, v) for r, c, v in la.entries(m))
        pos += diagram.payload[e]
    return la.from_entries((target_dim, pos), entries)


def augmented_homology(hc: HocolimComplex, aug: la.Mat) -> list[int]:
    """Homology of the complex hocolim -> target, target placed in degree -1."""
    target = aug.shape[0]
    dims = [target] + hc.dims
    ds = [aug] + hc.d
    out = []
    for k, dim in enumerate(dims):
        in_rank = la.rank(ds[k - 1]) if k >= 1 else 0
        out_rank = la.rank(ds[k]) if k < len(ds) else 0
        out.append(dim - in_rank - out_rank)
    return out


@dataclass
class CornerCut:
    vertex: tuple
    link_size: int
    link_homology: list[int]
    vertex_dim: int
    augmented_homology: list[int]

    @property
    def cuttable(self) -> bool:
        return not any(self.augmented_homology)

    def to_json(self) -> dict:
        return {"vertex": list(self.vertex), "link_size": self.link_size,
                "link_homology": self.link_homology, "vertex_dim": self.vertex_dim,
                "augmented_homology": self.augmented_homology, "cuttable": self.cuttable}


class NotCuttable(InputError):
    pass


def link(diagram: DiagramOverPoset, vertex) -> DiagramOverPoset:
    """Elements strictly above ``vertex``."""
    if vertex not in diagram:
        raise InputError(f"{vertex} is not a vertex")
    above = [e for e in diagram.elements if vertex in diagram.below()[e]]
    return diagram.restrict(above)


def corner_cut_report(diagram: DiagramOverPoset, vertex) -> CornerCut:
    if diagram.successors(vertex):
        raise InputError(f"{vertex} is not a corner (it has outgoing arrows)")
    lk = link(diagram, vertex)
    vdim = diagram.payload[vertex]
    if not lk.elements:
        return CornerCut(vertex, 0, [], vdim, [vdim])
    hc = hocolim(lk)
    aug = augmentation(lk, vdim, lambda e: diagram.map_between(e, vertex))
    return CornerCut(vertex, len(lk.elements), hc.homology(), vdim, augmented_homology(hc, aug))


def corner_cut(diagram: DiagramOverPoset, vertex) -> DiagramOverPoset:
    """Remove a corner whose link maps quasi-isomorphically onto it."""
    rep = corner_cut_report(diagram, vertex)
    if not rep.cuttable:
        raise NotCuttable(f"not cuttable: {vertex}; link homology {rep.link_homology}, "
                          f"vertex dim {rep.vertex_dim}, cone homology {rep.augmented_homology}")
    return diagram.restrict([e for e in diagram.elements if e != vertex])


def facet_opposite(diagram: DiagramOverPoset, n: int, j: int) -> DiagramOverPoset:
    """Restrict to vertices whose cut set avoids cut j."""
    return diagram.restrict([e for e in diagram.elements if j not in composition_to_cuts(e)])


@dataclass
class PipelineResult:
    n: int
    steps: list[CornerCut]
    final: DiagramOverPoset
    colimit_homology: list[list[int]] = field(default_factory=list)

    @property
    def final_shape(self) -> tuple[set, set]:
        return set(self.final.elements), {(s, t) for s, t, _ in self.final.arrows}

    def reproduces_pushout_shape(self) -> bool:
        n = self.n
        verts = {(0, n), (1, n - 1), (0, 1, n - 1)}
        arrows = {((0, 1, n - 1), (1, n - 1)), ((0, 1, n - 1), (0, n))}
        return self.final_shape == (verts, arrows)

    def to_json(self) -> dict:
        return {"n": self.n, "steps": [s.to_json() for s in self.steps],
                "final_vertices": [list(e) for e in self.final.elements],
                "final_arrows": [[list(s), list(t)] for s, t, _ in self.final.arrows],
                "pushout_shape": self.reproduces_pushout_shape()}


def corner_cut_pipeline(n: int, factors: BarFactors, track: bool = False) -> PipelineResult:
    """Cut corners (j | n - j) for j = n, ..., 2, each time passing to the opposite facet.

    With ``track`` the homology of the hocolim is recorded after every step;
    it must not change.
    """
    if n < 1:
        raise InputError("need n >= 1")
    diagram = barycentric_diagram(n, factors)
    steps = []
    history = [hocolim(diagram).homology()] if track else []
    for j in range(n, 1, -1):
        v = corner_vertex(n, j)
        steps.append(corner_cut_report(diagram, v))
        diagram = corner_cut(diagram, v)
        if track:
            history.append(hocolim(diagram).homology())
        diagram = facet_opposite(diagram, n, j)
        if track:
            history.append(hocolim(diagram).homology())
    return PipelineResult(n, steps, diagram, history)
