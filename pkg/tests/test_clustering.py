import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symsector.clustering import (
    ClusterDecomposition,
    common_coarsening,
    common_refinement,
    finest_decomposition,
    greedy_cluster_decompose,
    is_cm_function,
    is_confined,
    is_separated,
    iter_decompositions,
    stratum_membership,
)
from symsector.config import Configuration, InputError, center_of_mass, make_clustering_rule, random_configuration

RULE = make_clustering_rule(7, 1.0, 0.5)


def _decs(config):
    return [ClusterDecomposition(config, blocks, RULE) for blocks in iter_decompositions(config, RULE)]


def test_two_far_pairs():
    c = Configuration.from_points([(0.0,), (0.1,), (1e4,), (1e4 + 0.1,)])
    fin = finest_decomposition(c, RULE)
    assert sorted(p.n for p in fin.parts) == [2, 2]
    assert fin.refines(greedy_cluster_decompose(c, RULE))


def test_close_pair_cannot_split():
    c = Configuration.from_points([(0.0,), (0.5,)])
    assert not is_separated(c.sub([0]), c.sub([1]), RULE)
    assert is_confined(c, RULE)
    assert finest_decomposition(c, RULE).is_trivial()


def test_multiplicity_is_never_split():
    c = Configuration.from_points([(0.0, 0.0), (0.0, 0.0), (50.0, 0.0)])
    for d in _decs(c):
        assert any(blk == frozenset({0}) or 0 in blk and c.mult[0] == 2 for blk in d.blocks)
        assert all(p.n != 1 or p.points[0] != (0.0, 0.0) for p in d.parts)


def test_invalid_blocks_raise():
    c = Configuration.from_points([(0.0,), (0.5,)])
    with pytest.raises(InputError):
        ClusterDecomposition(c, (frozenset({0}), frozenset({1})), RULE)


@given(st.integers(0, 10_000), st.integers(1, 6), st.sampled_from([1, 2]))
def test_lattice_properties(seed, n, dim):
    rng = np.random.default_rng(seed)
    c = random_configuration(rng, n, dim, scale=(1e-2, 1e3), multiplicity_prob=0.1)
    decs = _decs(c)
    fin = finest_decomposition(c, RULE)
    assert all(fin.refines(d) for d in decs)
    for d1 in decs[:4]:
        for d2 in decs[:4]:
            r = common_refinement(d1, d2)
            k = common_coarsening(d1, d2)
            assert r.refines(d1) and r.refines(d2)
            assert d1.refines(k) and d2.refines(k)


@given(st.integers(0, 10_000), st.integers(1, 6))
def test_greedy_is_valid_for_any_order(seed, n):
    rng = np.random.default_rng(seed)
    c = random_configuration(rng, n, 2)
    fin = finest_decomposition(c, RULE)
    for s in (None, 0, 1, 2):
        g = greedy_cluster_decompose(c, RULE, s)
        assert fin.refines(g)


def test_stratum_membership_matches_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(30):
        c = random_configuration(rng, 4, 2)
        types = {d.type for d in _decs(c)}
        for tau in [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]:
            assert stratum_membership(c, RULE, tau) == (tau in types)


def test_center_of_mass_is_cm_function():
    rng = np.random.default_rng(4)
    samples = [random_configuration(rng, 4, 2) for _ in range(20)]

    def total_center(c):
        return float(c.n * np.sum(center_of_mass(c) ** 2))

    def raw(c):
        return float(np.sum(c.flat() ** 2))

    assert is_cm_function(total_center, samples, RULE, tol=1e-6).passed
    assert not is_cm_function(raw, samples, RULE).passed
