"""Acceptance runs at full size.

Each test logs one line ``criterion N: PASS|FAIL ...`` that the terminal
summary prints in order; the assertion then decides the test outcome.
"""

import itertools
import time
from math import comb

import numpy as np
import pytest

from symsector import boxcover, catcomplex, clustering, homology, nerve, potentials, sector
from symsector.config import make_clustering_rule, random_configuration, validate_rule
from symsector.regmax import reg_max, reg_max_grad


def _log(log, k, ok, detail, elapsed, budget):
    fast = elapsed < budget
    status = "PASS" if ok and fast else "FAIL"
    log.append(f"criterion {k}: {status}  {detail}  [{elapsed:.2f}s, budget {budget:g}s]")
    return ok and fast


def test_criterion_01_rule_fuzz(acceptance_log):
    rng = np.random.default_rng(1)
    Ns = rng.integers(1, 65, 10_000)
    d2s = 10 ** rng.uniform(-3, 3, 10_000)
    epss = 10 ** rng.uniform(-2, 1, 10_000)
    rules = [make_clustering_rule(int(N), float(d), float(e)) for N, d, e in zip(Ns, d2s, epss)]
    start = time.perf_counter()
    bad = [(r.N, msgs) for r in rules for ok, msgs in [validate_rule(r)] if not ok]
    elapsed = time.perf_counter() - start
    assert _log(acceptance_log, 1, not bad, f"10000 rules N<=64, {len(bad)} invalid", elapsed, 1.0), bad[:3]


def test_criterion_02_cluster_lattice(acceptance_log):
    rule = make_clustering_rule(7, 1.0, 0.5)
    rng = np.random.default_rng(2)
    violations = []
    start = time.perf_counter()
    for i in range(1000):
        n, dim = int(rng.integers(1, 8)), int(rng.integers(1, 3))
        conf = random_configuration(rng, n, dim, (1e-2, 1e3), multiplicity_prob=0.1)
        fin = clustering.finest_decomposition(conf, rule)
        greedy = [clustering.greedy_cluster_decompose(conf, rule, s) for s in (None, 0, 1, 2)]
        for g in greedy:
            if g.violations():
                violations.append((i, "greedy", g.violations()))
            if not fin.refines(g):
                violations.append((i, "finest does not refine greedy"))
        for g1, g2 in itertools.combinations(greedy, 2):
            for d in (clustering.common_refinement(g1, g2), clustering.common_coarsening(g1, g2)):
                if d.violations():
                    violations.append((i, "lattice", d.violations()))
    elapsed = time.perf_counter() - start
    assert _log(acceptance_log, 2, not violations,
                f"1000 configs n<=7 dim 1,2, {len(violations)} violations", elapsed, 30.0), violations[:3]


def test_criterion_03_box_uniqueness(acceptance_log):
    rng = np.random.default_rng(3)
    mismatches = []
    start = time.perf_counter()
    for i in range(1000):
        n = int(rng.integers(1, 9))
        b = float(10 ** rng.uniform(-2.5, -0.7))
        xs = boxcover.random_line_configuration(rng, n)
        greedy = boxcover.box_decompose(xs, b).runs
        shuffled = boxcover.box_decompose(xs, b, rng).runs
        brute = boxcover.brute_force_box_decompositions(xs, b)
        if brute != [greedy] or shuffled != greedy:
            mismatches.append((i, xs.tolist(), b))
    elapsed = time.perf_counter() - start
    assert _log(acceptance_log, 3, not mismatches,
                f"1000 configs n<=8, {len(mismatches)} mismatches", elapsed, 10.0), mismatches[:3]


@pytest.mark.slow
def test_criterion_04_cover(acceptance_log):
    rng = np.random.default_rng(4)
    failures = []
    start = time.perf_counter()
    for n in range(2, 11):
        params = boxcover.BoxParams.uniform(n)
        for _ in range(10_000):
            xs = boxcover.random_line_configuration(rng, n)
            try:
                boxcover.cover_witness(xs, params)
            except AssertionError as exc:
                failures.append((n, xs.tolist(), str(exc)))
    elapsed = time.perf_counter() - start
    assert _log(acceptance_log, 4, not failures,
                f"10^4 configs per n=2..10, {len(failures)} without witness", elapsed, 60.0), failures[:3]


def test_criterion_05_rho_agreement(acceptance_log):
    rng = np.random.default_rng(5)
    disagreements, skipped = [], 0
    start = time.perf_counter()
    for _ in range(10_000):
        n = int(rng.integers(1, 9))
        params = boxcover.BoxParams.uniform(n)
        xs = boxcover.random_line_configuration(rng, n)
        k = int(rng.integers(0, n + 1))
        agree = boxcover.membership_agreement(xs, params, k, 1e-6)
        if agree is None:
            skipped += 1
        elif not agree:
            disagreements.append({"xs": xs.tolist(), "k": k, "rho": boxcover.rho(xs, params, k)})
    elapsed = time.perf_counter() - start
    ok = _log(acceptance_log, 5, not disagreements,
              f"10^4 samples n<=8, {len(disagreements)} disagreements, {skipped} within margin",
              elapsed, 60.0)
    assert ok, disagreements


def test_criterion_06_regmax(acceptance_log):
    rng = np.random.default_rng(6)
    worst = {"bounds": 0.0, "monotone": 0.0, "convex": 0.0, "drop": 0.0, "translation": 0.0}
    start = time.perf_counter()
    for _ in range(1000):
        p = int(rng.integers(1, 5))
        t = rng.uniform(-2, 2, p)
        eta = 10 ** rng.uniform(-2, 0, p)
        m = reg_max(t, eta)
        # (1) monotone and convex
        worst["monotone"] = max(worst["monotone"], -float(reg_max_grad(t, eta).min()))
        u = rng.uniform(-2, 2, p)
        lam = rng.random()
        gap = reg_max(lam * t + (1 - lam) * u, eta) - lam * m - (1 - lam) * reg_max(u, eta)
        worst["convex"] = max(worst["convex"], gap)
        # (2) bounds
        worst["bounds"] = max(worst["bounds"], t.max() - m, m - (t + eta).max())
        # (3) a dominated entry drops out
        if p >= 2:
            j = int(rng.integers(p))
            rest = np.delete(t, j), np.delete(eta, j)
            t2 = t.copy()
            t2[j] = (rest[0] - rest[1]).max() - eta[j] - rng.uniform(0, 1)
            worst["drop"] = max(worst["drop"], abs(reg_max(t2, eta) - reg_max(*rest)))
        # (4) translation
        a = rng.uniform(-5, 5)
        worst["translation"] = max(worst["translation"], abs(reg_max(t + a, eta) - m - a))
    elapsed = time.perf_counter() - start
    ok = (worst["drop"] <= 1e-8 and all(worst[k] <= 1e-6 for k in worst))
    detail = "1000 tuples p<=4, worst " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert _log(acceptance_log, 6, ok, detail, elapsed, 60.0), worst


def test_criterion_07_translation(acceptance_log):
    rng = np.random.default_rng(7)
    Q = potentials.QuadraticPotential(((1.0, 0.4), (0.4, 2.0)))
    start = time.perf_counter()
    worst = 0.0
    for _ in range(10_000):
        n = int(rng.integers(1, 11))
        scale = 10 ** rng.uniform(-3, 3)
        zs = scale * (rng.normal(size=n) + 1j * rng.normal(size=n)) + scale * rng.normal()
        for q in (potentials.DEFAULT_PHI, Q):
            worst = max(worst, potentials.translation_identity_check(zs, q))
    elapsed = time.perf_counter() - start
    assert _log(acceptance_log, 7, worst <= 1e-12,
                f"10^4 samples n<=10, relative residual {worst:.1e}", elapsed, 5.0)


RULE8 = make_clustering_rule(5, 1.0, 0.5)


def _potential(n):
    return potentials.SmoothedPotential(RULE8, 0.9 * 0.25 ** (n - 1))


@pytest.mark.slow
def test_criterion_08_smoothed_potential(acceptance_log):
    rng = np.random.default_rng(8)
    dev_ratio = add_err = 0.0
    start = time.perf_counter()
    for i in range(1000):
        n = 2 + i % 4
        sp = _potential(n)
        conf = random_configuration(rng, n, 2, (1e-2, 10))
        v = potentials.eval_smoothed(conf, sp)
        dev_ratio = max(dev_ratio, abs(v - potentials.phi_n(conf)) / sp.t)
        for blocks in clustering.iter_decompositions(conf, RULE8):
            parts = sum(potentials.eval_smoothed(conf.sub(b), sp) for b in blocks)
            add_err = max(add_err, abs(parts - v))
    margins = []
    for n in range(2, 6):
        spec = potentials.DiskSampleSpec(n=n, samples=250, seed=80 + n, scale=(1e-2, 3.0))
        rep = potentials.psh_check(potentials.smoothed_lift(_potential(n)), spec, tol=1e-6)
        margins.append(rep.min_margin)
    elapsed = time.perf_counter() - start
    ok = dev_ratio <= 1 and add_err <= 1e-10 and min(margins) >= -1e-6
    detail = (f"1000 samples n=2..5: max |f - phi|/t {dev_ratio:.3f}, additivity {add_err:.1e}; "
              f"psh 1000 disks, min margin {min(margins):.1e}")
    assert _log(acceptance_log, 8, ok, detail, elapsed, 300.0)


@pytest.mark.slow
def test_criterion_09_transversality(acceptance_log):
    rng = np.random.default_rng(9)
    cases = []
    for n in range(2, 7):
        for size in (1, 2, 3):
            if size <= n:
                cases.extend((n, cuts) for cuts in itertools.combinations(range(n + 1), size))
    picks = rng.choice(len(cases), 40, replace=False)
    min_sv, min_br, samples, notes = np.inf, np.inf, 0, 0
    start = time.perf_counter()
    for idx in picks:
        n, cuts = cases[idx]
        params = boxcover.BoxParams.uniform(n)
        specs = [sector.WitnessSpec(params, k) for k in cuts]
        got = sector.joint_boundary_samples(specs, 25, seed=int(idx))
        samples += len(got.points)
        notes += len(got.notes)
        min_sv = min(min_sv, sector.transversality_check(specs, got.points).value)
        for s in specs:
            min_br = min(min_br, sector.bracket_check(s, got.points).value)
    # rays from the inside also reach boundary points where box terms of several points are active
    min_ray = np.inf
    for n in range(2, 7):
        for k in range(n + 1):
            spec = sector.WitnessSpec(boxcover.BoxParams.uniform(n), k)
            got = sector.boundary_samples(spec, 10, seed=90 + n * 10 + k)
            min_ray = min(min_ray, sector.bracket_check(spec, got.points).value)
    elapsed = time.perf_counter() - start
    ok = samples == 1000 and min_sv >= 1e-6 and min_br >= 1e-6 and min_ray >= 1e-6
    detail = (f"{samples} joint-boundary samples n<=6, |cuts|<=3: min sigma {min_sv:.4g}, "
              f"min bracket {min_br:.4g}, {notes} rejected starts; ray samples min bracket {min_ray:.4g}")
    assert _log(acceptance_log, 9, ok, detail, elapsed, 300.0)


def test_criterion_10_bar_cech(acceptance_log):
    start = time.perf_counter()
    certs = [nerve.match_bar_cech(nerve.GluingDescriptor(strips=c), n, samples=10)
             for c in (1, 2) for n in range(7)]
    elapsed = time.perf_counter() - start
    bad = [(c.strips, c.n, c.failures) for c in certs if not c.passed]
    assert _log(acceptance_log, 10, not bad, f"n=0..6, 1 and 2 strips, {len(bad)} failed",
                elapsed, 5.0), bad


def test_criterion_11_homology_gluing(acceptance_log):
    disk = homology.SurfaceDescriptor((0,))
    start = time.perf_counter()
    named = {c: homology.verify_gluing(disk, disk, 6, strips=c) for c in (1, 2, 3)}
    shapes = {1: lambda n: [1], 2: lambda n: [1, 1], 3: lambda n: [comb(2, q) for q in range(min(2, n) + 1)]}
    named_ok = all(rep.passed and all(homology.row(rep.computed, n) == shapes[c](n) for n in range(1, 7))
                   for c, rep in named.items())
    bad = []
    for gl, gr, c in itertools.product(range(4), range(4), range(1, 4)):
        rep = homology.verify_gluing(homology.SurfaceDescriptor((gl,)), homology.SurfaceDescriptor((gr,)),
                                     6, strips=c)
        if not rep.passed:
            bad.append(((gl, gr, c), rep.mismatches))
    elapsed = time.perf_counter() - start
    ok = named_ok and not bad
    detail = f"disk/annulus/pants exact {named_ok}; 48 cases g<=3 c<=3 n<=6, {len(bad)} mismatched"
    assert _log(acceptance_log, 11, ok, detail, elapsed, 120.0), bad


@pytest.fixture(scope="module")
def criterion_12():
    start = time.perf_counter()
    T = catcomplex.trinion_model()
    rng = np.random.default_rng(12)
    random_bad = []
    for i in range(20):
        M = catcomplex.random_bimodule(rng, 5, 4)
        for n in range(1, max(M.weights()) + 2):
            rep = catcomplex.pushout_formula(T, M, n)
            if not rep.isomorphism:
                random_bad.append((i, rep.to_json()))
    tensor_bad = []
    for i in range(20):
        V, W = catcomplex.random_complex(rng, 3, 3), catcomplex.random_complex(rng, 3, 3)
        M = catcomplex.tensor_bimodule(V, W)
        for n in range(1, max(M.weights(), default=0) + 2):
            rep = catcomplex.pushout_formula(T, M, n)
            if not rep.isomorphism:
                tensor_bad.append((i, rep.to_json()))
    ident = catcomplex.delta_tensor_check(T)
    pipes = {}
    for n in range(1, 5):
        M = catcomplex.random_bimodule(np.random.default_rng(120 + n), n + 1, 2)
        res = nerve.corner_cut_pipeline(n, catcomplex.TrinionFactors(T, M))
        pipes[n] = res.reproduces_pushout_shape() and all(s.cuttable for s in res.steps)
    return {"random": random_bad, "tensor": tensor_bad, "identities": ident, "pipeline": pipes,
            "elapsed": time.perf_counter() - start}


def test_criterion_12a_pushout_random(criterion_12):
    assert not criterion_12["random"], criterion_12["random"][:2]


def test_criterion_12b_pushout_tensor(criterion_12):
    assert not criterion_12["tensor"], criterion_12["tensor"][:2]


def test_criterion_12c_trinion_square_zero_and_weight3(criterion_12):
    ident = criterion_12["identities"]
    assert ident["square_zero"] and ident["weight3_zero"]


def test_criterion_12d_trinion_commutation(criterion_12):
    pairs = criterion_12["identities"]["pairs"]
    assert criterion_12["identities"]["commute"], {k: v for k, v in pairs.items() if not v["commute"]}


def test_criterion_12e_pipeline(criterion_12):
    assert all(criterion_12["pipeline"].values()), criterion_12["pipeline"]


def test_criterion_12_summary(criterion_12, acceptance_log):
    ident = criterion_12["identities"]
    noncommuting = [k for k, v in ident["pairs"].items() if not v["commute"]]
    parts = {
        "pushout on random modules": not criterion_12["random"],
        "pushout on V(x)W": not criterion_12["tensor"],
        "square-zero": ident["square_zero"],
        "weight-3 vanishing": ident["weight3_zero"],
        "commutation": ident["commute"],
        "corner-cut pipeline n<=4": all(criterion_12["pipeline"].values()),
    }
    ok = all(parts.values())
    detail = "; ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in parts.items())
    if noncommuting:
        detail += f" (legs {', '.join(noncommuting)} anticommute)"
    assert _log(acceptance_log, 12, ok, detail, criterion_12["elapsed"], 120.0)


def test_criterion_13_associativity(acceptance_log):
    rng = np.random.default_rng(13)
    failed = []
    start = time.perf_counter()
    for i in range(20):
        U, V, W = (catcomplex.random_complex(rng, 3, 3, lo=int(rng.integers(-1, 2))) for _ in range(3))
        rep = catcomplex.associator(U, V, W)
        if not (rep["homology_equal"] and rep["chain_map"] and rep["invertible"]):
            failed.append(i)
    elapsed = time.perf_counter() - start
    assert _log(acceptance_log, 13, not failed, f"20 random triples, {len(failed)} failed",
                elapsed, 30.0), failed
