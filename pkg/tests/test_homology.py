from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symsector import linalg as la
from symsector.config import InputError
from symsector.homology import (
    SurfaceDescriptor,
    bar_tensor,
    build_strip_module,
    derived_tensor,
    euler_characteristic,
    glue,
    k_theory_comparison,
    row,
    sym_homology_oracle,
    verify_gluing,
)

DISK = SurfaceDescriptor((0,))


def test_parse():
    assert SurfaceDescriptor.parse("g=0") == DISK
    assert SurfaceDescriptor.parse("g=1,2").genera == (1, 2)
    assert SurfaceDescriptor.parse("0,2").genera == (0, 2)
    with pytest.raises(InputError):
        SurfaceDescriptor.parse("g=x")
    with pytest.raises(InputError):
        SurfaceDescriptor(())


def test_oracle_examples():
    ann = sym_homology_oracle(SurfaceDescriptor((1,)), 6)
    assert all(row(ann, n) == [1, 1] for n in range(1, 7))
    pants = sym_homology_oracle(SurfaceDescriptor((2,)), 4)
    assert row(pants, 2) == [1, 2, 1]
    assert row(pants, 1) == [1, 2]
    assert all(row(sym_homology_oracle(DISK, 5), n) == [1] for n in range(6))


@given(st.integers(0, 5), st.integers(0, 6))
def test_oracle_single_component(g, n):
    dims = sym_homology_oracle(SurfaceDescriptor((g,)), n)
    assert row(dims, n) == [comb(g, q) for q in range(min(g, n) + 1)]


def test_oracle_components_convolve():
    a = sym_homology_oracle(SurfaceDescriptor((1, 0)), 3)
    # Sym^n(A u D) = union of Sym^k(A) x Sym^{n-k}(D)
    assert row(a, 3) == [4, 3]


def test_strip_actions():
    ann = build_strip_module(SurfaceDescriptor((1,)), (0,), 4)
    for q in (0, 1):
        for n in range(q, 3):
            m = ann.action_matrix(0, n, q)
            assert la.to_fractions(m) == [[1]]
    two = build_strip_module(SurfaceDescriptor((0, 0)), (0, 0, 1), 3)
    assert two.commutes()
    m = ((1, 2), ())
    assert two.act(0, m) == ((2, 2), ()) and two.act(2, m) == ((1, 3), ())
    with pytest.raises(InputError):
        build_strip_module(DISK, (1,), 3)


@pytest.mark.parametrize("strips,expect", [(1, lambda n: [1]), (2, lambda n: [1, 1]),
                                           (3, lambda n: [comb(2, q) for q in range(min(2, n) + 1)])])
def test_two_disks(strips, expect):
    rep = verify_gluing(DISK, DISK, 5, strips=strips)
    assert rep.passed, rep.mismatches
    for n in range(1, 6):
        assert row(rep.computed, n) == expect(n)


def test_glue_bookkeeping():
    g = glue(SurfaceDescriptor((1, 0)), SurfaceDescriptor((2,)), (0, 1), (0, 0))
    assert g.genera == (1 + 0 + 2 + 2 - 3 + 1,)
    assert g.euler == (0 + 1 - 1) - 2
    apart = glue(SurfaceDescriptor((0, 0)), SurfaceDescriptor((0, 0)), (0, 1), (0, 1))
    assert apart.genera == (0, 0)
    with pytest.raises(InputError):
        glue(DISK, DISK, (0,), ())


@pytest.mark.parametrize("gl", range(4))
@pytest.mark.parametrize("gr", range(4))
@pytest.mark.parametrize("c", [1, 2, 3])
def test_all_small_gluings(gl, gr, c):
    rep = verify_gluing(SurfaceDescriptor((gl,)), SurfaceDescriptor((gr,)), 6, strips=c)
    assert rep.passed, rep.mismatches
    assert rep.glued.genera == (gl + gr + c - 1,)


def test_two_component_side():
    rep = verify_gluing(SurfaceDescriptor((0, 1)), SurfaceDescriptor((1,)), 4,
                        left_ends=(0, 1), right_ends=(0, 0))
    assert rep.passed


@pytest.mark.parametrize("c", [1, 2])
def test_bar_matches_koszul(c):
    ML = build_strip_module(SurfaceDescriptor((1,)), (0,) * c, 4)
    MR = build_strip_module(DISK, (0,) * c, 4)
    kos = derived_tensor(ML, MR, 3)
    assert bar_tensor(ML, MR, 3) == {k: v for k, v in kos.items() if k[0] <= 3}


def test_euler_characteristic():
    pants = sym_homology_oracle(SurfaceDescriptor((2,)), 3)
    assert euler_characteristic(pants, 2) == 0
    assert euler_characteristic(sym_homology_oracle(DISK, 3), 3) == 1


def test_k_theory_report():
    rows = k_theory_comparison(3)
    assert {r["case"] for r in rows} == {"trinion", "strip", "two strips"}
    assert all(r["bounded"] for r in rows)
