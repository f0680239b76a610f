import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symsector.config import (
    ClusteringRule,
    Configuration,
    InputError,
    center_of_mass,
    composition_to_cuts,
    cut_subsets,
    cuts_to_composition,
    enumerate_compositions,
    make_clustering_rule,
    radius,
    relax_rule,
    validate_rule,
)

coords = st.floats(-1e3, 1e3, allow_nan=False)


def test_from_points_merges_equal_points():
    c = Configuration.from_points([(1.0,), (0.0,), (1.0,)])
    assert c.points == ((0.0,), (1.0,))
    assert c.mult == (1, 2)
    assert c.n == 3


def test_rejects_bad_input():
    with pytest.raises(InputError):
        Configuration(3, ((0, 0, 0),), (1,))
    with pytest.raises(InputError):
        Configuration.from_points([(0.0,)], mult=[0])
    with pytest.raises(InputError):
        Configuration(1, ((1.0,), (0.0,)), (1, 1))


def test_center_and_radius():
    c = Configuration.from_points([(0.0, 0.0), (2.0, 0.0)], mult=[3, 1])
    np.testing.assert_allclose(center_of_mass(c), [0.5, 0.0])
    assert radius(c) == pytest.approx(1.5)


def test_make_rule_values():
    rule = make_clustering_rule(5, 1.0, 0.5)
    np.testing.assert_allclose(rule.r, [1 / 9, 5 / 3, 25, 375, 5625])
    np.testing.assert_allclose(rule.d, [0, 1, 15, 225, 3375])
    assert validate_rule(rule)[0]


def test_validate_reports_violations():
    ok, bad = validate_rule(ClusteringRule((1.0, 2.0), (0.0, 1.0)))
    assert not ok
    assert "r_2 <= d_2 + r_1" in bad


@given(st.integers(1, 40), st.floats(1e-3, 1e3), st.floats(1e-3, 10))
def test_made_rules_are_valid(N, d2, eps):
    assert validate_rule(make_clustering_rule(N, d2, eps))[0]


@given(st.integers(2, 20), st.floats(1e-2, 1e2), st.floats(1e-2, 2))
def test_relaxed_rules_stay_valid(N, d2, eps):
    rule = make_clustering_rule(N, d2, eps)
    out = relax_rule(rule)
    assert validate_rule(out)[0]
    assert all(a >= b for a, b in zip(out.r, rule.r))


@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=6), st.tuples(coords, coords))
def test_shift_moves_center(pts, v):
    c = Configuration.from_points(pts)
    np.testing.assert_allclose(center_of_mass(c.shift(v)), center_of_mass(c) + np.array(v),
                               atol=1e-8 * (1 + np.abs(c.coords).max()))


@given(st.integers(0, 7))
def test_cut_composition_bijection(n):
    subsets = cut_subsets(n)
    assert len(subsets) == 2 ** (n + 1) - 1
    comps = {cuts_to_composition(s, n) for s in subsets}
    assert comps == set(enumerate_compositions(n))
    for s in subsets:
        assert composition_to_cuts(cuts_to_composition(s, n)) == s


def test_json_round_trip():
    c = Configuration.from_points([(0.0, 1.0), (2.0, 3.0)], mult=[2, 1])
    assert Configuration.from_json(c.to_json()) == c
    rule = make_clustering_rule(3, 1.0, 0.5)
    assert ClusteringRule.from_json(rule.to_json()) == rule
