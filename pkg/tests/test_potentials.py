import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symsector.clustering import iter_decompositions
from symsector.config import Configuration, InputError, make_clustering_rule, random_configuration
from symsector.potentials import (
    DiskSampleSpec,
    QuadraticPotential,
    SmoothedPotential,
    StripGluing,
    adapted_check,
    adapted_sweep,
    cm_standard_check,
    cubic_two_point,
    disk_average,
    disk_samples,
    displaceability_potential,
    eval_smoothed,
    im_squared_cm_part,
    phi_n,
    psh_check,
    smoothed_lift,
    translation_identity_check,
    uniform_disk_smoother,
    varouchas_patch,
)

RULE = make_clustering_rule(5, 1.0, 0.5)
SP = SmoothedPotential(RULE, 0.9 * 0.25 ** 4)

FINE = make_clustering_rule(5, 0.01, 0.5)


def _strata_samples(rng, count):
    out = []
    while len(out) < count:
        xs = np.concatenate([rng.normal(0, 0.003, 2), 1 + rng.normal(0, 0.003, 1)])
        out.append(xs + 1j * rng.normal(0, 0.01, 3))
    return out


def test_phi_examples():
    assert phi_n(np.array([1j, -1j])) == pytest.approx(2.0)
    assert phi_n(np.zeros(4, dtype=complex)) == 0.0
    a, b = np.array([1 + 2j, 3j]), np.array([0.5 - 1j])
    assert phi_n(np.concatenate([a, b])) == pytest.approx(phi_n(a) + phi_n(b))


def test_quadratic_validation():
    with pytest.raises(InputError):
        QuadraticPotential(((1.0, 0.5), (0.0, 1.0)))
    with pytest.raises(InputError):
        QuadraticPotential(((-1.0, 0.0), (0.0, 0.5)))


def test_translation_identity_example():
    assert translation_identity_check(np.array([2j, 0])) == 0.0
    assert translation_identity_check(np.array([1 + 1j, -1 - 1j])) == 0.0


@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=10))
def test_translation_identity_fuzz(zs):
    Q = QuadraticPotential(((1.0, 0.3), (0.3, 2.0)))
    assert translation_identity_check(np.array(zs), Q) <= 1e-12


def test_disk_average_exact_for_quadratics():
    Q = QuadraticPotential(((1.0, 0.0), (0.0, 1.0)))
    # mean of |z|^2 over a disk of radius s is |c|^2 + s^2 / 2
    got = disk_average(Q, [1 + 1j, 0], [0.5, 2.0])
    np.testing.assert_allclose(got, [2 + 0.125, 2.0], rtol=1e-14)


def test_single_point_is_exact():
    for z in (0.3 + 0.7j, -5j, 12.0):
        assert eval_smoothed(Configuration.from_complex([z]), SP) == pytest.approx(z.imag**2, abs=1e-15)


def test_t_range_is_enforced():
    conf = Configuration.from_complex([0, 1j])
    with pytest.raises(InputError):
        eval_smoothed(conf, SmoothedPotential(RULE, 0.5))
    with pytest.raises(InputError):
        eval_smoothed(Configuration.from_complex(np.arange(6)), SP)


def test_real_pair_stays_near_zero():
    conf = Configuration.from_complex([1e-3, -1e-3])
    assert 0 <= eval_smoothed(conf, SP) <= SP.t / 2


def test_far_clusters_add():
    left = Configuration.from_complex([0, 0.01j])
    for gap in (50, 80, 200):
        right = Configuration.from_complex([gap, gap + 0.02])
        whole = eval_smoothed(left + right, SP)
        assert whole == pytest.approx(eval_smoothed(left, SP) + eval_smoothed(right, SP), abs=1e-12)


def test_permutation_invariance(rng):
    zs = random_configuration(rng, 4, 2, (1e-2, 3)).as_complex()
    f = smoothed_lift(SP)
    assert f(zs) == f(zs[::-1]) == f(np.roll(zs, 1))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_deviation_and_additivity(n, rng):
    for _ in range(40):
        conf = random_configuration(rng, n, 2, (1e-2, 10))
        v = eval_smoothed(conf, SP)
        dev = v - phi_n(conf)
        assert -1e-12 <= dev <= SP.t / 2 + 1e-12
        for blocks in iter_decompositions(conf, RULE):
            parts = sum(eval_smoothed(conf.sub(b), SP) for b in blocks)
            assert abs(parts - v) <= 1e-10 * max(1.0, abs(v))


def test_continuous_across_decomposition_change():
    # the finest decomposition of {0, x} changes as x crosses d_2
    f = smoothed_lift(SP)
    d = RULE.d[1]
    vals = [f(np.array([0, x])) for x in (d * (1 - 1e-9), d * (1 + 1e-9))]
    assert abs(vals[0] - vals[1]) < 1e-8


def test_uniform_smoother_jumps():
    sp = SmoothedPotential(RULE, SP.t, smoother=uniform_disk_smoother)
    f = smoothed_lift(sp)
    d = RULE.d[1]
    jump = abs(f(np.array([0, d * (1 - 1e-9)])) - f(np.array([0, d * (1 + 1e-9)])))
    assert jump > 1e-3 * sp.t


def test_psh_controls():
    spec = DiskSampleSpec(n=1, samples=30, seed=1)
    assert not psh_check(lambda z: -float(np.sum(np.abs(z) ** 2)), spec).passed
    spec3 = DiskSampleSpec(n=3, samples=30, seed=2)
    assert psh_check(phi_n, spec3).passed


@pytest.mark.parametrize("n", [2, 3])
def test_smoothed_is_psh_on_sample(n):
    spec = DiskSampleSpec(n=n, samples=40, seed=n, scale=(1e-2, 3.0))
    rep = psh_check(smoothed_lift(SP), spec, tol=1e-6)
    assert rep.passed, rep.failures[:2]


def test_disk_samples_avoid_diagonal():
    spec = DiskSampleSpec(n=4, samples=20)
    for z, v in disk_samples(spec):
        gaps = np.abs(z[:, None] - z[None, :])[np.triu_indices(4, 1)]
        assert gaps.min() > spec.diagonal_gap
        assert np.linalg.norm(v) == pytest.approx(1.0)


def test_varouchas_ends_and_bound():
    fV = lambda z: float(z[0].real)
    fW = lambda z: float(z[0].real) + 0.01
    eta = lambda z: float(np.clip(z[0].imag, 0, 1))
    s, t = 0.2, 0.01
    g = varouchas_patch(fV, fW, eta, s, t)
    assert g(np.array([0.3 + 2j])) == 0.3
    assert g(np.array([0.3 - 2j])) == pytest.approx(0.31)
    for y in np.linspace(0.05, 0.95, 7):
        z = np.array([0.3 + 1j * y])
        assert min(fV(z), fW(z)) - s / 2 - 1e-12 <= g(z) <= max(fV(z), fW(z)) + s / 4 + 1e-12


def test_varouchas_selects_dominant_branch():
    fV = lambda z: 0.0
    fW = lambda z: 0.0
    eta = lambda z: 0.05
    s = 0.4
    g = varouchas_patch(fV, fW, eta, s, 0.05)
    # fW - s etaV exceeds fV - s etaW by 0.9 s > s/2, so the patch equals it
    assert g(np.zeros(1)) == pytest.approx(-s * 0.05, abs=1e-12)
    with pytest.raises(InputError):
        varouchas_patch(fV, fW, eta, s, s)


def test_cm_standard(rng):
    samples = _strata_samples(rng, 20)
    assert cm_standard_check(phi_n, (2, 1), samples, FINE, cm_part=im_squared_cm_part).passed
    sp = SmoothedPotential(FINE, 0.01)
    rep = cm_standard_check(smoothed_lift(sp), (2, 1), samples, FINE, cm_part=im_squared_cm_part)
    assert rep.passed, rep
    cross = cm_standard_check(lambda z: float(z.imag[0] * z.imag[2]), (2, 1), samples, FINE)
    assert not cross.passed


def test_adapted():
    sp = SmoothedPotential(FINE, 0.01)
    window = (-10, 0, 1, 11)
    rep = adapted_check(smoothed_lift(sp), StripGluing(2), window, (1, 2, 1), FINE, samples=10)
    assert rep["passed"], rep
    coupled = adapted_check(lambda z: float(z.imag[0] * z.imag[-1]), StripGluing(2), window,
                            (1, 2, 1), FINE, samples=5)
    assert not coupled["passed"]
    with pytest.raises(InputError):
        adapted_check(phi_n, StripGluing(1), (0, 1, 1, 2), (1, 1, 1), FINE)
    with pytest.raises(InputError):
        adapted_check(phi_n, StripGluing(1), (-1e-3, 0, 1, 1 + 1e-3), (1, 1, 1), FINE)


def test_adapted_sweep_vanishes_past_range():
    sp = SmoothedPotential(FINE, 0.01)
    gaps = [0.0003, 0.001, 0.003, 0.01, 0.03, 0.1]
    rep = adapted_sweep(smoothed_lift(sp), StripGluing(1), (1, 1, 1), FINE, gaps)
    # the defect peaks once windows are comparable to the interaction range
    assert max(rep["residuals"]) > 1e-8
    assert rep["vanishes_beyond"] is not None and rep["vanishes_beyond"] <= sp.range
    assert all(r <= 1e-12 for g, r in zip(gaps, rep["residuals"]) if g >= sp.range)


def test_displaceability():
    w, g = displaceability_potential(np.array([1.0 + 0j]), 3)
    assert (w, g) == (1.0, 3.0)
    z1, z2 = 0.4 + 1j, -1.2 + 0.3j
    W, dW = cubic_two_point(z1 + z2, z1 * z2)
    assert W == pytest.approx(z1**3 + z2**3)
    assert cubic_two_point(0, 0)[1] == (0, 0)
    assert max(map(abs, cubic_two_point(1e-3, 0)[1])) > 0
