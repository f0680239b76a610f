import numpy as np
import pytest

from symsector import linalg as la
from symsector.catcomplex import TrinionFactors, random_bimodule, trinion_model
from symsector.config import InputError
from symsector.nerve import (
    DiagramOverPoset,
    GluingDescriptor,
    NotCuttable,
    bar_compositions,
    barycentric_diagram,
    build_bar_degree,
    build_cech_poset,
    cech_arrow_count,
    corner_cut,
    corner_cut_pipeline,
    corner_cut_report,
    hocolim,
    match_bar_cech,
    strip_components,
)

# frozen from the first enumeration; checked against closed forms below
ARROWS = [0, 2, 9, 28, 75, 186, 441]


def test_small_degrees():
    d0 = build_bar_degree(GluingDescriptor(), 0)
    assert d0.elements == [(0, 0)] and d0.arrows == []
    d1 = build_bar_degree(GluingDescriptor(), 1)
    assert set(d1.elements) == {(1, 0), (0, 1), (0, 1, 0)}
    assert sorted(t for s, t, _ in d1.arrows if s == (0, 1, 0)) == [(0, 1), (1, 0)]


@pytest.mark.parametrize("n", range(7))
def test_counts(n):
    bar = build_bar_degree(GluingDescriptor(), n)
    assert len(bar.elements) == 2 ** (n + 1) - 1
    assert len(bar.arrows) == ARROWS[n] == (n + 1) * (2**n - 1) == cech_arrow_count(n)
    assert len(build_cech_poset(n).elements) == 2 ** (n + 1) - 1


def test_compositions_are_brute_forced():
    import itertools

    for n in range(5):
        brute = set()
        for k in range(n + 1):
            for mids in itertools.product(range(1, n + 1), repeat=k):
                rest = n - sum(mids)
                for nl in range(rest + 1):
                    brute.add((nl, *mids, rest - nl))
        assert set(bar_compositions(n)) == brute


def test_cech_small():
    c1 = build_cech_poset(1)
    assert len(c1.elements) == 3 and c1.is_poset()
    c3 = build_cech_poset(3)
    top = frozenset(range(4))
    assert all(c3.leq(e, top) for e in c3.elements)


def test_match_example():
    cert = match_bar_cech(GluingDescriptor(), 5, samples=5)
    assert cert.matches[frozenset({1, 3})] == (1, 2, 2)
    assert cert.passed


@pytest.mark.parametrize("strips", [1, 2, 3])
def test_match_passes(strips):
    for n in range(5):
        cert = match_bar_cech(GluingDescriptor(strips=strips), n, samples=10)
        assert cert.passed, cert.failures
        assert cert.arrow_counts[0] == cert.arrow_counts[1]


def test_strip_components():
    assert strip_components((1, 2, 0), 1) == 1
    assert strip_components((0, 2, 1, 0), 3) == 6 * 3


def test_gluing_validation():
    with pytest.raises(InputError):
        GluingDescriptor(strips=0)
    with pytest.raises(InputError):
        GluingDescriptor(strips=2, left_ends=(0,))
    with pytest.raises(InputError):
        GluingDescriptor(strips=1, left_ends=(1,))


def test_barycentric_payloads():
    d = barycentric_diagram(2, dims={"X": (1, 2, 1), "A": (1, 2, 1), "Y": (1, 1, 1)})
    assert len(d.elements) == 7 and len(d.arrows) == 9
    assert d.payload[(2, 0)] == 1
    assert d.payload[(1, 1)] == 2
    assert d.payload[(0, 2, 0)] == 1
    assert d.payload[(1, 1, 0)] == 4


def test_cycle_is_rejected():
    d = DiagramOverPoset(["a", "b"], [("a", "b", ""), ("b", "a", "")])
    assert not d.is_poset()


def _pair(m):
    return DiagramOverPoset(["a", "b"], [("a", "b", "f")], payload={"a": 1, "b": 1},
                            maps={("a", "b"): la.mat([[m]])})


def test_corner_cut_controls():
    assert corner_cut_report(_pair(1), "b").cuttable
    assert corner_cut(_pair(1), "b").elements == ["a"]
    with pytest.raises(NotCuttable):
        corner_cut(_pair(0), "b")
    with pytest.raises(InputError):
        corner_cut(_pair(1), "a")
    empty = DiagramOverPoset(["a", "b"], [("a", "b", "f")], payload={"a": 0, "b": 0},
                             maps={("a", "b"): la.zeros(0, 0)})
    assert corner_cut_report(empty, "b").cuttable


def test_hocolim_of_span():
    # the pushout of k <- k -> k along identities is k
    d = DiagramOverPoset(["m", "l", "r"], [("m", "l", ""), ("m", "r", "")],
                         payload={"m": 1, "l": 1, "r": 1},
                         maps={("m", "l"): la.eye(1), ("m", "r"): la.eye(1)})
    assert hocolim(d).homology() == [1, 0]
    z = DiagramOverPoset(["m", "l", "r"], [("m", "l", ""), ("m", "r", "")],
                         payload={"m": 1, "l": 0, "r": 0},
                         maps={("m", "l"): la.zeros(0, 1), ("m", "r"): la.zeros(0, 1)})
    assert hocolim(z).homology() == [0, 1]


def test_trinion_diagram_commutes():
    d = barycentric_diagram(1, TrinionFactors(trinion_model(), random_bimodule(np.random.default_rng(0), 3, 2)))
    assert d.commutes()
    h = hocolim(d).homology()
    assert all(x >= 0 for x in h)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pipeline(n):
    M = random_bimodule(np.random.default_rng(n), n + 1, 2)
    res = corner_cut_pipeline(n, TrinionFactors(trinion_model(), M), track=True)
    assert res.reproduces_pushout_shape()
    assert all(step.cuttable for step in res.steps)
    trimmed = [tuple(np.trim_zeros(h, "b")) for h in res.colimit_homology]
    assert len(set(trimmed)) == 1


def test_dot_output():
    dot = build_cech_poset(2).to_dot("cech")
    assert dot.startswith("digraph cech {") and dot.count("->") == 9
