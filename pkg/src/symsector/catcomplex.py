"""Decategorified categorical complexes.

Chain complexes, their coproduct totalization, weight-graded modules over
A_r = k[e_1, ..., e_r]/(e_i^2), the trinion model (1, 2, 1) with its three
leg actions, the pushout formula for the relative tensor product over
k[e] (x) k[e], and semicohomology.  All arithmetic is exact over Q.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .config import InputError

Mat = la.Mat


# chain complexes ---------------------------------------------------------------

@dataclass(frozen=True)
class ChainComplex:
    """Components C^lo, ..., C^hi with d[i]: C^{lo+i} -> C^{lo+i+1}.

    ``basis`` optionally labels the basis of each component (used to build
    explicit isomorphisms between iterated totalizations).
    """

    dims: tuple[int, ...]
    d: tuple[Mat, ...]
    lo: int = 0
    basis: tuple[tuple, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        if any(x < 0 for x in self.dims):
            raise InputError("negative dimension")
        if len(self.d) != max(len(self.dims) - 1, 0):
            raise InputError("need one differential between consecutive components")
        for i, m in enumerate(self.d):
            if m.shape != (self.dims[i + 1], self.dims[i]):
                raise InputError(f"d^{self.lo + i} has shape {m.shape}, expected "
                                 f"{(self.dims[i + 1], self.dims[i])}")
        for i in range(len(self.d) - 1):
            if not la.is_zero(la.matmul(self.d[i + 1], self.d[i])):
                raise InputError(f"d^{self.lo + i + 1} d^{self.lo + i} != 0")
        if self.basis is not None:
            if len(self.basis) != len(self.dims) or any(
                    len(b) != n for b, n in zip(self.basis, self.dims)):
                raise InputError("basis labels do not match the dimensions")
        else:
            object.__setattr__(self, "basis", tuple(
                tuple((self.lo + i, j) for j in range(n)) for i, n in enumerate(self.dims)))

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return (self.lo, self.dims) == (other.lo, other.dims) and all(
            la.equal(a, b) for a, b in zip(self.d, other.d))

    __hash__ = None

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def dim(self, n: int) -> int:
        return self.dims[n - self.lo] if self.lo <= n <= self.hi else 0

    def diff(self, n: int) -> Mat:
        """d^n: C^n -> C^{n+1}, zero outside the stored range."""
        if self.lo <= n < self.hi:
            return self.d[n - self.lo]
        return la.zeros(self.dim(n + 1), self.dim(n))

    def labels(self, n: int) -> tuple:
        return self.basis[n - self.lo] if self.lo <= n <= self.hi else ()

    def homology(self) -> dict[int, int]:
        return {n: self.dim(n) - la.rank(self.diff(n)) - la.rank(self.diff(n - 1))
                for n in self.degrees()}

    @classmethod
    def unit(cls) -> "ChainComplex":
        return cls((1,), (), 0, (((),),))

    @classmethod
    def from_dims(cls, dims: Sequence[int], lo: int = 0) -> "ChainComplex":
        """Zero differential."""
        d = tuple(la.zeros(dims[i + 1], dims[i]) for i in range(len(dims) - 1))
        return cls(tuple(dims), d, lo)

    @classmethod
    def from_json(cls, data: dict | str) -> "ChainComplex":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            dims = [int(x) for x in data["dims"]]
            raw = data.get("d", [])
            lo = int(data.get("lo", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed complex: {exc}") from exc
        if len(raw) != max(len(dims) - 1, 0):
            raise InputError("need one differential between consecutive components")
        d = tuple(la.mat(m, cols=dims[i]) if m else la.zeros(dims[i + 1], dims[i])
                  for i, m in enumerate(raw))
        return cls(tuple(dims), d, lo)

    def to_json(self) -> dict:
        return {"lo": self.lo, "dims": list(self.dims),
                "d": [[[str(x) for x in row] for row in la.to_fractions(m)] for m in self.d]}


def _random_int_matrix(rng, rows, cols, lo=-2, hi=2) -> Mat:
    return la.mat(rng.integers(lo, hi + 1, size=(rows, cols)).tolist(), cols=cols)


def random_complex(rng: np.random.Generator, length: int = 3, max_dim: int = 3,
                   lo: int = 0) -> ChainComplex:
    """Random integer complex: each d^i is a random combination of the rows killing im d^{i-1}."""
    dims = [int(rng.integers(0, max_dim + 1)) for _ in range(length)]
    ds = []
    for i in range(length - 1):
        prev = ds[-1] if ds else la.zeros(dims[0], 0)
        K = la.left_kernel(prev)           # rows k with k prev = 0
        X = _random_int_matrix(rng, dims[i + 1], K.shape[0])
        ds.append(la.matmul(X, K) if K.shape[0] else la.zeros(dims[i + 1], dims[i]))
    return ChainComplex(tuple(dims), tuple(ds), lo)


def totalize(V: ChainComplex, W: ChainComplex) -> ChainComplex:
    """Tot^n = sum_{a+b=n} V^a (x) W^b with d = d_V (x) 1 + (-1)^a 1 (x) d_W.

    Blocks are ordered by increasing a; inside a block the basis is the
    Kronecker order of V^a and W^b.
    """
    lo, hi = V.lo + W.lo, V.hi + W.hi
    blocks = {}
    labels = []
    for n in range(lo, hi + 1):
        pos, lab = 0, []
        for a in V.degrees():
            b = n - a
            if W.lo <= b <= W.hi:
                blocks[(n, a)] = pos
                pos += V.dim(a) * W.dim(b)
                lab.extend((u, w) for u in V.labels(a) for w in W.labels(b))
        labels.append(tuple(lab))
    dims = [len(lab) for lab in labels]
    ds = []
    for n in range(lo, hi):
        entries = []
        for a in V.degrees():
            b = n - a
            if (n, a) not in blocks:
                continue
            src = blocks[(n, a)]
            if (n + 1, a + 1) in blocks:
                m = la.kron(V.diff(a), la.eye(W.dim(b)) if W.dim(b) else la.zeros(0, 0))
                dst = blocks[(n + 1, a + 1)]
                entries.extend((dst + r, src + c, v) for r, c, v in la.entries(m))
            if (n + 1, a) in blocks:
                sign = -1 if a % 2 else 1
                m = la.kron(la.eye(V.dim(a)) if V.dim(a) else la.zeros(0, 0), W.diff(b))
                dst = blocks[(n + 1, a)]
                entries.extend((dst + r, src + c, sign * v) for r, c, v in la.entries(m))
        ds.append(la.from_entries((dims[n - lo + 1], dims[n - lo]), entries))
    return ChainComplex(tuple(dims), tuple(ds), lo, tuple(labels))


def semicohomology(C: ChainComplex) -> dict[int, int]:
    """dim C^n / im d^{n-1}."""
    return {n: C.dim(n) - la.rank(C.diff(n - 1)) for n in C.degrees()}


def _reassociate(label):
    (u, v), w = label
    return (u, (v, w))


def associator(U: ChainComplex, V: ChainComplex, W: ChainComplex) -> dict:
    """Compare Tot(Tot(U, V), W) and Tot(U, Tot(V, W)) through (u v) w -> u (v w)."""
    left = totalize(totalize(U, V), W)
    right = totalize(U, totalize(V, W))
    maps, chain_map, invertible = {}, True, True
    for n in left.degrees():
        src = [_reassociate(x) for x in left.labels(n)]
        pos = {x: i for i, x in enumerate(right.labels(n))}
        if set(pos) != set(src):
            invertible = False
            continue
        maps[n] = la.from_entries((right.dim(n), left.dim(n)),
                                  ((pos[x], i, 1) for i, x in enumerate(src)))
        invertible &= la.is_invertible(maps[n]) or left.dim(n) == 0
    for n in left.degrees():
        if n + 1 in maps and n in maps:
            lhs = la.matmul(maps[n + 1], left.diff(n))
            rhs = la.matmul(right.diff(n), maps[n])
            chain_map &= la.equal(lhs, rhs)
    hl, hr = left.homology(), right.homology()
    return {"chain_map": chain_map, "invertible": invertible, "left_homology": hl,
            "right_homology": hr, "homology_equal": hl == hr}


# weight-graded modules over A_r --------------------------------------------

def monomials(r: int, weight: int) -> list[tuple[int, ...]]:
    """Basis of A_r in a weight: increasing tuples of generator indices."""
    return list(itertools.combinations(range(r), weight))


def algebra_dims(r: int) -> list[int]:
    return [len(monomials(r, w)) for w in range(r + 1)]


def algebra_product(r: int, a: int, b: int) -> Mat:
    """Multiplication A_r^a (x) A_r^b -> A_r^{a+b} in Kronecker order."""
    left, right = monomials(r, a), monomials(r, b)
    target = {m: i for i, m in enumerate(monomials(r, a + b))} if a + b <= r else {}
    entries = []
    for i, s in enumerate(left):
        for j, t in enumerate(right):
            if set(s) & set(t):
                continue
            entries.append((target[tuple(sorted(s + t))], i * len(right) + j, 1))
    return la.from_entries((len(target), len(left) * len(right)), entries)


@dataclass
class WeightedModule:
    """Weights lo..hi with commuting square-zero generator actions M^w -> M^{w+1}."""

    dims: dict[int, int]
    gens: list[dict[int, Mat]]
    name: str = "M"

    def __post_init__(self):
        self.dims = {int(w): int(n) for w, n in self.dims.items() if n}
        for i, g in enumerate(self.gens):
            for w, m in g.items():
                if m.shape != (self.dim(w + 1), self.dim(w)):
                    raise InputError(f"{self.name}: generator {i} at weight {w} has shape "
                                     f"{m.shape}, expected {(self.dim(w + 1), self.dim(w))}")

    @property
    def r(self) -> int:
        return len(self.gens)

    def dim(self, w: int) -> int:
        return self.dims.get(w, 0)

    def weights(self) -> list[int]:
        return sorted(self.dims)

    def gen(self, i: int, w: int) -> Mat:
        m = self.gens[i].get(w)
        return m if m is not None else la.zeros(self.dim(w + 1), self.dim(w))

    def monomial(self, s: Sequence[int], w: int) -> Mat:
        """Action of the product of the generators in s on M^w."""
        out = la.eye(self.dim(w)) if self.dim(w) else la.zeros(0, 0)
        for k, i in enumerate(s):
            out = la.matmul(self.gen(i, w + k), out)
        return out

    def action(self, b: int, w: int) -> Mat:
        """A^b (x) M^w -> M^{w+b} (algebra factor first); equals M^w (x) A^b -> M^{w+b}
        up to reordering, see ``right_action``."""
        mons = monomials(self.r, b)
        cols = [self.monomial(s, w) for s in mons]
        entries = []
        dm = self.dim(w)
        for a, m in enumerate(cols):
            entries.extend((i, a * dm + j, v) for i, j, v in la.entries(m))
        return la.from_entries((self.dim(w + b), len(mons) * dm), entries)

    def right_action(self, w: int, b: int) -> Mat:
        """M^w (x) A^b -> M^{w+b} (module factor first)."""
        mons = monomials(self.r, b)
        entries = []
        for a, s in enumerate(mons):
            m = self.monomial(s, w)
            entries.extend((i, j * len(mons) + a, v) for i, j, v in la.entries(m))
        return la.from_entries((self.dim(w + b), len(mons) * self.dim(w)), entries)

    def identities(self) -> dict:
        """Square-zero and pairwise commutation of the generators, per weight."""
        square, commute = {}, {}
        for w in range(min(self.weights(), default=0) - 1, max(self.weights(), default=0) + 1):
            for i in range(self.r):
                square[(i, w)] = la.is_zero(la.matmul(self.gen(i, w + 1), self.gen(i, w)))
                for j in range(i + 1, self.r):
                    a = la.matmul(self.gen(i, w + 1), self.gen(j, w))
                    b = la.matmul(self.gen(j, w + 1), self.gen(i, w))
                    commute[(i, j, w)] = la.equal(a, b)
        return {"square_zero": all(square.values()), "commute": all(commute.values()),
                "square_detail": square, "commute_detail": commute}

    def validate(self):
        ident = self.identities()
        if not ident["square_zero"]:
            raise InputError(f"{self.name}: a generator does not square to zero")
        if not ident["commute"]:
            raise InputError(f"{self.name}: generators do not commute")
        return self


def algebra_module(r: int) -> WeightedModule:
    """A_r as a module over itself."""
    dims = {w: n for w, n in enumerate(algebra_dims(r))}
    gens = []
    for i in range(r):
        g = {}
        for w in range(r):
            src, dst = monomials(r, w), {m: k for k, m in enumerate(monomials(r, w + 1))}
            entries = [(dst[tuple(sorted(s + (i,)))], k, 1) for k, s in enumerate(src) if i not in s]
            g[w] = la.from_entries((len(dst), len(src)), entries)
        gens.append(g)
    return WeightedModule(dims, gens, f"A_{r}")


def complex_module(C: ChainComplex) -> WeightedModule:
    """A chain complex as a k[e]-module with e acting by d."""
    dims = {n: C.dim(n) for n in C.degrees()}
    return WeightedModule(dims, [{n: C.diff(n) for n in C.degrees()}], "C")


def disk_module() -> WeightedModule:
    """k in weight 0 with e acting by zero."""
    return WeightedModule({0: 1}, [{}], "D")


EpsilonBimodule = WeightedModule


def epsilon_bimodule(dims: dict[int, int], eps1: dict[int, Mat], eps2: dict[int, Mat]) -> WeightedModule:
    return WeightedModule(dims, [eps1, eps2], "M").validate()


def tensor_bimodule(V: ChainComplex, W: ChainComplex) -> WeightedModule:
    """V (x) W with e_1 = d_V (x) 1 and e_2 = 1 (x) d_W, block layout of ``totalize``."""
    T = totalize(V, W)
    e1, e2 = {}, {}
    for n in T.degrees():
        pos_src = {x: i for i, x in enumerate(T.labels(n))}
        pos_dst = {x: i for i, x in enumerate(T.labels(n + 1))}
        ent1, ent2 = [], []
        for a in V.degrees():
            b = n - a
            if not W.lo <= b <= W.hi:
                continue
            dV, dW = V.diff(a), W.diff(b)
            for (r, c, v) in la.entries(dV):
                for w in W.labels(b):
                    ent1.append((pos_dst[(V.labels(a + 1)[r], w)], pos_src[(V.labels(a)[c], w)], v))
            for (r, c, v) in la.entries(dW):
                for u in V.labels(a):
                    ent2.append((pos_dst[(u, W.labels(b + 1)[r])], pos_src[(u, W.labels(b)[c])], v))
        shape = (T.dim(n + 1), T.dim(n))
        e1[n] = la.from_entries(shape, ent1)
        e2[n] = la.from_entries(shape, ent2)
    dims = {n: T.dim(n) for n in T.degrees()}
    return WeightedModule(dims, [e1, e2], "V(x)W").validate()


def random_bimodule(rng: np.random.Generator, max_weight: int = 5, max_dim: int = 4,
                    lo: int = 0) -> WeightedModule:
    """Random module over k[e] (x) k[e], built weight by weight.

    At each weight the pair (X, Y) = (e_1, e_2) is drawn from the solution
    space of X E_1 = 0, Y E_2 = 0, X E_2 = Y E_1, where E_i are the actions
    arriving at that weight.
    """
    weights = list(range(lo, lo + max_weight + 1))
    dims = {w: int(rng.integers(1, max_dim + 1)) for w in weights}
    e1, e2 = {}, {}
    prev1 = prev2 = la.zeros(dims[weights[0]], 0)
    for w in weights[:-1]:
        src, dst = dims[w], dims[w + 1]
        X, Y = _solve_pair(rng, prev1, prev2, src, dst)
        e1[w], e2[w] = X, Y
        prev1, prev2 = X, Y
    return epsilon_bimodule(dims, e1, e2)


def _solve_pair(rng, E1: Mat, E2: Mat, src: int, dst: int) -> tuple[Mat, Mat]:
    # unknowns: X (dst x src) then Y, row-major
    p = E1.shape[1]
    nx = dst * src
    rows = []
    for i in range(dst):
        for k in range(p):
            rx = {}
            ry = {}
            rxy = {}
            for j in range(src):
                a = E1[j, k].element
                b = E2[j, k].element
                if a:
                    rx[i * src + j] = a                 # (X E1)[i, k]
                    rxy[nx + i * src + j] = -a          # -(Y E1)[i, k]
                if b:
                    ry[nx + i * src + j] = b            # (Y E2)[i, k]
                    rxy[i * src + j] = rxy.get(i * src + j, 0) + b
            rows.extend(r for r in (rx, ry, rxy) if r)
    A = la.from_entries((len(rows), 2 * nx), ((ri, c, v) for ri, r in enumerate(rows)
                                               for c, v in r.items()))
    K = la.kernel(A) if rows else la.eye(2 * nx)
    coeff = _random_int_matrix(rng, K.shape[1], 1) if K.shape[1] else la.zeros(0, 1)
    sol = la.matmul(K, coeff) if K.shape[1] else la.zeros(2 * nx, 1)
    vals = [sol[i, 0].element for i in range(2 * nx)]
    X = la.from_entries((dst, src), ((i, j, vals[i * src + j]) for i in range(dst) for j in range(src)))
    Y = la.from_entries((dst, src), ((i, j, vals[nx + i * src + j]) for i in range(dst) for j in range(src)))
    return X, Y


# the trinion --------------------------------------------------------------------

@dataclass(frozen=True)
class TrinionModel:
    """Weights 0, 1, 2 of dimensions (1, 2, 1); weight-1 vectors are ([X], [Y]).

    delta0[j]: weight 0 -> 1 and delta1[j]: weight 1 -> 2 for the legs j = 1, 2, 3.
    """

    dims: tuple[int, int, int]
    delta0: dict[int, Mat]
    delta1: dict[int, Mat]

    def leg_module(self, legs: Sequence[int] = (1, 2)) -> WeightedModule:
        """The trinion as a module over A_r, generator i acting by the deltas of legs[i]."""
        gens = [{0: self.delta0[j], 1: self.delta1[j]} for j in legs]
        return WeightedModule(dict(enumerate(self.dims)), gens, "T")

    def composite(self, outer: int, inner: int):
        """delta1[outer] delta0[inner] as a rational number."""
        return la.matmul(self.delta1[outer], self.delta0[inner])[0, 0].element


def trinion_model() -> TrinionModel:
    d0 = {1: la.mat([[1], [1]]), 2: la.mat([[0], [1]]), 3: la.mat([[-1], [0]])}
    d1 = {1: la.mat([[-1, 1]]), 2: la.mat([[1, 0]]), 3: la.mat([[0, 1]])}
    return TrinionModel((1, 2, 1), d0, d1)


def delta_tensor_check(T: TrinionModel) -> dict:
    """Weight-2 structure of the trinion model.

    For each pair of legs the composite through the two legs is reported
    both ways; they commute when the values agree.  Square-zero per leg and
    the vanishing of everything at weight 3 are checked as well.
    """
    legs = sorted(T.delta0)
    square = {j: T.composite(j, j) == 0 for j in legs}
    pairs = {}
    for i, j in itertools.combinations(legs, 2):
        a, b = T.composite(i, j), T.composite(j, i)
        pairs[f"{i},{j}"] = {"d1_%d d0_%d" % (i, j): str(a), "d1_%d d0_%d" % (j, i): str(b),
                              "commute": a == b, "rank": int(a != 0 or b != 0)}
    weight3 = len(T.dims) == 3
    mod = T.leg_module(legs)
    to_weight3 = all(la.is_zero(mod.gen(i, 2)) and mod.gen(i, 2).shape[0] == 0
                     for i in range(len(legs)))
    generator = all(p["rank"] == 1 for p in pairs.values())
    return {"square_zero": all(square.values()), "square_detail": square,
            "commute": all(p["commute"] for p in pairs.values()), "pairs": pairs,
            "weight3_zero": weight3 and to_weight3, "generator_rank1": generator}


# relative tensor products and the pushout formula ----------------------------

@dataclass
class Presentation:
    """A quotient space G / im(R) together with the block layout of G."""

    blocks: dict[tuple, tuple[int, int]]     # key -> (offset, size)
    gen_dim: int
    relations: Mat

    @property
    def dim(self) -> int:
        return self.gen_dim - la.rank(self.relations)

    def complement(self) -> Mat:
        """Columns of G spanning a complement of im(R) (standard basis vectors)."""
        R = self.relations
        if R.shape[1] == 0 or la.rank(R) == 0:
            keep = list(range(self.gen_dim))
        else:
            # pivots of [R | I] beyond R occupy a complement
            aug = la.hstack(R, la.eye(self.gen_dim))
            _, piv = aug.rref()
            keep = [p - R.shape[1] for p in piv if p >= R.shape[1]]
        return la.from_entries((self.gen_dim, len(keep)), ((k, i, 1) for i, k in enumerate(keep)))

    def coordinates(self) -> Mat:
        """Rows spanning the annihilator of im(R): a coordinate map G -> quotient."""
        if self.relations.shape[1] == 0:
            return la.eye(self.gen_dim) if self.gen_dim else la.zeros(0, 0)
        return la.left_kernel(self.relations)


def _block_layout(keys_sizes) -> tuple[dict, int]:
    blocks, pos = {}, 0
    for key, size in keys_sizes:
        blocks[key] = (pos, size)
        pos += size
    return blocks, pos


def _place(entries, m: Mat, row0: int, col0: int, sign=1):
    entries.extend((row0 + r, col0 + c, sign * v) for r, c, v in la.entries(m))


def relative_tensor(X: WeightedModule, Y: WeightedModule, n: int) -> Presentation:
    """Weight n of X (x)_{A_r} Y as a coequalizer of X (x) A (x) Y => X (x) Y."""
    if X.r != Y.r:
        raise InputError("modules over different algebras")
    r = X.r
    gens = [((a,), X.dim(a) * Y.dim(n - a)) for a in X.weights() if Y.dim(n - a)]
    blocks, gdim = _block_layout(gens)
    rel_keys = []
    for a in X.weights():
        for b in range(1, r + 1):
            c = n - a - b
            size = X.dim(a) * len(monomials(r, b)) * Y.dim(c)
            if size:
                rel_keys.append(((a, b, c), size))
    rblocks, rdim = _block_layout(rel_keys)
    entries = []
    for (a, b, c), (col0, _) in rblocks.items():
        # x (x) s (x) y  ->  (x s) (x) y  -  x (x) (s y)
        xs = la.kron(X.right_action(a, b), la.eye(Y.dim(c)))
        if (a + b,) in blocks:
            _place(entries, xs, blocks[(a + b,)][0], col0)
        sy = la.kron(la.eye(X.dim(a)), Y.action(b, c))
        if (a,) in blocks:
            _place(entries, sy, blocks[(a,)][0], col0, -1)
    R = la.from_entries((gdim, rdim), entries)
    return Presentation(blocks, gdim, R)


def pushout_presentation(T: TrinionModel, M: WeightedModule, n: int,
                         legs: Sequence[int] = (1, 2)) -> Presentation:
    """(T^1 (x) M^{n-1}) + M^n modulo (m_1, m_2) -> (sum_j d0_j(1) (x) m_j, -sum_j e_j m_j)."""
    if n < 1:
        raise InputError("need n >= 1")
    mp, mn = M.dim(n - 1), M.dim(n)
    blocks, gdim = _block_layout([((1,), T.dims[1] * mp), ((0,), mn)])
    entries = []
    for col, j in enumerate(legs):
        col0 = col * mp
        _place(entries, la.kron(T.delta0[j], la.eye(mp) if mp else la.zeros(0, 0)),
               blocks[(1,)][0], col0)
        _place(entries, M.gen(col, n - 1), blocks[(0,)][0], col0, -1)
    R = la.from_entries((gdim, len(legs) * mp), entries)
    return Presentation(blocks, gdim, R)


def _induced(src: Presentation, dst: Presentation, f: Mat) -> Mat:
    """Matrix of the map src-quotient -> dst-quotient induced by f: G_src -> G_dst."""
    return la.matmul(dst.coordinates(), la.matmul(f, src.complement()))


def _inclusion(src: Presentation, dst: Presentation) -> Mat:
    entries = []
    for key, (off, size) in src.blocks.items():
        if key in dst.blocks:
            doff, dsize = dst.blocks[key]
            if dsize != size:
                raise InputError(f"block {key} has different sizes")
            entries.extend((doff + i, off + i, 1) for i in range(size))
    return la.from_entries((dst.gen_dim, src.gen_dim), entries)


def _to_module(T: TrinionModel, M: WeightedModule, n: int, legs: Sequence[int]) -> Mat:
    """The map (T^1 (x) M^{n-1}) + M^n -> M^n: identity on M^n and t (x) m -> sum_j c_j e_j m,
    where t = sum_j c_j d0_j(1)."""
    basis = la.hstack(*[T.delta0[j] for j in legs])
    coeffs = la.solve_columns(basis, la.eye(T.dims[1]))
    if coeffs is None or not la.is_invertible(basis):
        raise InputError("the chosen legs do not give a basis of weight 1")
    mp, mn = M.dim(n - 1), M.dim(n)
    entries = []
    for t in range(T.dims[1]):
        image = la.zeros(mn, mp)
        for col in range(len(legs)):
            c = coeffs[col, t].element
            if c and mn and mp:
                image = image + la.scale(M.gen(col, n - 1), c)
        _place(entries, image, 0, t * mp)
    _place(entries, la.eye(mn) if mn else la.zeros(0, 0), 0, T.dims[1] * mp)
    return la.from_entries((mn, T.dims[1] * mp + mn), entries)


@dataclass
class PushoutReport:
    n: int
    pushout_dim: int
    tensor_dim: int
    module_dim: int
    to_tensor_invertible: bool
    to_module_invertible: bool
    well_defined: bool

    @property
    def isomorphism(self) -> bool:
        return (self.pushout_dim == self.tensor_dim == self.module_dim
                and self.to_tensor_invertible and self.to_module_invertible and self.well_defined)

    def to_json(self) -> dict:
        return {"n": self.n, "pushout_dim": self.pushout_dim, "tensor_dim": self.tensor_dim,
                "module_dim": self.module_dim, "to_tensor_invertible": self.to_tensor_invertible,
                "to_module_invertible": self.to_module_invertible,
                "well_defined": self.well_defined, "isomorphism": self.isomorphism}


def pushout_formula(T: TrinionModel, M: WeightedModule, n: int,
                    legs: Sequence[int] = (1, 2)) -> PushoutReport:
    """The pushout in weight n, compared with T (x)_A M and with M^n."""
    P = pushout_presentation(T, M, n, legs)
    Q = relative_tensor(T.leg_module(legs), M, n)
    to_q = _induced(P, Q, _inclusion(P, Q))
    g = _to_module(T, M, n, legs)
    well = la.is_zero(la.matmul(g, P.relations))
    to_m = la.matmul(g, P.complement())
    return PushoutReport(n, P.dim, Q.dim, M.dim(n), la.is_invertible(to_q),
                         la.is_invertible(to_m), well)


def semicohomology_via_disk(C: ChainComplex) -> dict[int, int]:
    """dims of D (x)_{k[e]} C, D the disk module: the quotient of C by im d, computed as a coequalizer."""
    X, Y = disk_module(), complex_module(C)
    return {n: relative_tensor(X, Y, n).dim for n in C.degrees()}


# payloads for the barycentric diagram -------------------------------------

@dataclass
class TrinionFactors:
    """X = trinion (legs acting as the two generators), A = A_2, Y = M."""

    T: TrinionModel
    M: WeightedModule
    legs: tuple[int, int] = (1, 2)

    def __post_init__(self):
        self.X = self.T.leg_module(self.legs)
        self.r = 2

    def dim(self, role: str, weight: int) -> int:
        if role == "X":
            return self.X.dim(weight)
        if role == "A":
            dims = algebra_dims(self.r)
            return dims[weight] if 0 <= weight < len(dims) else 0
        if role == "Y":
            return self.M.dim(weight)
        raise InputError(f"unknown role {role}")

    def merge_map(self, left: tuple[str, int], right: tuple[str, int]) -> Mat:
        (lr, a), (rr, b) = left, right
        if (lr, rr) == ("X", "A"):
            return self._trim(self.X.right_action(a, b), self.dim("X", a) * self.dim("A", b))
        if (lr, rr) == ("A", "A"):
            return self._trim(algebra_product(self.r, a, b) if a + b <= self.r else
                              la.zeros(0, self.dim("A", a) * self.dim("A", b)),
                              self.dim("A", a) * self.dim("A", b))
        if (lr, rr) == ("A", "Y"):
            return self._trim(self.M.action(a, b), self.dim("A", a) * self.dim("Y", b))
        raise InputError(f"no merge map for {lr} with {rr}")

    @staticmethod
    def _trim(m: Mat, cols: int) -> Mat:
        if m.shape[1] != cols:
            raise InputError("merge map has the wrong source dimension")
        return m
