"""Exact rational matrices on top of sympy's DomainMatrix over QQ.

Everything here tolerates zero-sized shapes, which turn up constantly for
chain complexes with empty degrees.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Mat = DomainMatrix


# DomainMatrix equality depends on the internal format, so every constructor
# here returns the dense format; compare with ``equal`` regardless.

def zeros(rows: int, cols: int) -> Mat:
    return DomainMatrix.zeros((rows, cols), QQ).to_dense()


def eye(n: int) -> Mat:
    return DomainMatrix.eye(n, QQ).to_dense() if n else zeros(0, 0)


def equal(a: Mat, b: Mat) -> bool:
    return a.shape == b.shape and is_zero(a.to_dense() - b.to_dense())


def mat(rows: Sequence[Sequence], cols: int | None = None) -> Mat:
    """Matrix from nested rows of ints, Fractions or rationals."""
    rows = [list(r) for r in rows]
    if not rows:
        return zeros(0, cols or 0)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged rows")
    return DomainMatrix([[QQ(_q(x)) for x in r] for r in rows], (len(rows), width), QQ)


def _q(x):
    if isinstance(x, Fraction):
        return QQ(x.numerator, x.denominator)
    return x


def from_entries(shape: tuple[int, int], entries: Iterable[tuple[int, int, object]]) -> Mat:
    """Matrix of the given shape from (row, col, value) triples; repeated keys add up."""
    rows, cols = shape
    data: dict[int, dict[int, object]] = {}
    for i, j, v in entries:
        row = data.setdefault(i, {})
        row[j] = row.get(j, QQ(0)) + QQ(_q(v))
    data = {i: {j: v for j, v in r.items() if v} for i, r in data.items()}
    data = {i: r for i, r in data.items() if r}
    return DomainMatrix(data, (rows, cols), QQ).to_dense()


def rank(m: Mat) -> int:
    r, c = m.shape
    return 0 if r == 0 or c == 0 else m.rank()


def is_zero(m: Mat) -> bool:
    r, c = m.shape
    return r == 0 or c == 0 or m.is_zero_matrix


def matmul(a: Mat, b: Mat) -> Mat:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if 0 in a.shape or 0 in b.shape:
        return zeros(a.shape[0], b.shape[1])
    return a * b


def kernel(m: Mat) -> Mat:
    """Columns spanning the null space of m."""
    r, c = m.shape
    if c == 0:
        return zeros(0, 0)
    if r == 0:
        return eye(c)
    ns = m.nullspace()
    if ns.shape[0] == 0:
        return zeros(c, 0)
    return ns.transpose()


def left_kernel(m: Mat) -> Mat:
    """Rows spanning the vectors y with y m = 0."""
    return kernel(m.transpose()).transpose()


def hstack(*ms: Mat) -> Mat:
    ms = [m for m in ms]
    rows = ms[0].shape[0]
    if any(m.shape[0] != rows for m in ms):
        raise ValueError("row counts differ")
    ms = [m for m in ms if m.shape[1]]
    if not ms:
        return zeros(rows, 0)
    if rows == 0:
        return zeros(0, sum(m.shape[1] for m in ms))
    return ms[0].hstack(*ms[1:]) if len(ms) > 1 else ms[0]


def vstack(*ms: Mat) -> Mat:
    return hstack(*[m.transpose() for m in ms]).transpose()


def block_diag(*ms: Mat) -> Mat:
    rows = sum(m.shape[0] for m in ms)
    cols = sum(m.shape[1] for m in ms)
    out = []
    r0 = c0 = 0
    for m in ms:
        out.extend((r0 + i, c0 + j, v) for i, j, v in entries(m))
        r0 += m.shape[0]
        c0 += m.shape[1]
    return from_entries((rows, cols), out)


def entries(m: Mat) -> Iterable[tuple[int, int, object]]:
    for (i, j), v in m.to_sparse().to_dok().items():
        yield i, j, v


def kron(a: Mat, b: Mat) -> Mat:
    ra, ca = a.shape
    rb, cb = b.shape
    ea = list(entries(a))
    eb = list(entries(b))
    return from_entries((ra * rb, ca * cb),
                        ((i * rb + k, j * cb + l, x * y) for i, j, x in ea for k, l, y in eb))


def scale(m: Mat, s) -> Mat:
    return m * QQ(_q(s)) if 0 not in m.shape else m


def homology_dim(d_in: Mat, d_out: Mat, dim: int) -> int:
    """dim ker(d_out) - rank(d_in) at a space of dimension ``dim``."""
    return dim - rank(d_out) - rank(d_in)


def is_invertible(m: Mat) -> bool:
    r, c = m.shape
    return r == c and rank(m) == r


def solve_columns(a: Mat, b: Mat) -> Mat | None:
    """Some X with a X = b, or None when the system is inconsistent."""
    r, c = a.shape
    if b.shape[1] == 0:
        return zeros(c, 0)
    aug = hstack(a, b)
    if rank(aug) != rank(a):
        return None
    if c == 0:
        return zeros(0, b.shape[1])
    rref, pivots = aug.rref()
    x = {}
    for row, p in enumerate(pivots):
        if p >= c:
            break
        for k in range(b.shape[1]):
            v = rref[row, c + k].element
            if v:
                x[(p, k)] = v
    return from_entries((c, b.shape[1]), ((i, j, v) for (i, j), v in x.items()))


def to_fractions(m: Mat) -> list[list[Fraction]]:
    r, c = m.shape
    dense = m.to_dense()
    return [[Fraction(int(dense[i, j].element.numerator), int(dense[i, j].element.denominator))
             for j in range(c)] for i in range(r)]


def sparse_rank(shape: tuple[int, int], entries: Iterable[tuple[int, int, object]]) -> int:
    """Rank of a sparse matrix given by (row, col, value) triples, without densifying."""
    rows, cols = shape
    if rows == 0 or cols == 0:
        return 0
    data: dict[int, dict[int, object]] = {}
    for i, j, v in entries:
        row = data.setdefault(i, {})
        row[j] = row.get(j, QQ(0)) + QQ(_q(v))
    data = {i: {j: v for j, v in r.items() if v} for i, r in data.items()}
    data = {i: r for i, r in data.items() if r}
    if not data:
        return 0
    return DomainMatrix(data, shape, QQ).rank()
