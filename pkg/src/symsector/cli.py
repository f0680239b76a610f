"""Command line entry point: ``symsector <subcommand> ...``.

Every run writes a JSON report carrying its manifest.  Exit codes: 0 all
checks pass, 1 a property failed, 2 bad input, 3 inconclusive (too many
skipped samples).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib.metadata import PackageNotFoundError, packages_distributions, version
from pathlib import Path

import numpy as np

from . import boxcover, catcomplex, clustering, homology, nerve, potentials, sector
from .config import (
    ClusteringRule,
    Configuration,
    InputError,
    InvariantViolation,
    make_clustering_rule,
    random_configuration,
    validate_rule,
)

SCHEMA = "symsector.report/1"
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3
CHUNKS = 16


def _version() -> str:
    try:
        dist = packages_distributions().get("symsector", ["symsector"])[0]
        return version(dist)
    except PackageNotFoundError:
        return "0+unknown"


def threads() -> int:
    raw = os.environ.get("SYMSECTOR_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"SYMSECTOR_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise InputError("SYMSECTOR_THREADS must be at least 1")
    return n


def _chunked(fn, seed: int, total: int, *args) -> list:
    """Run fn(child_seed, count, *args) over a fixed number of chunks.

    The chunking and the child seeds depend only on the seed, so the result
    does not depend on how many workers run it.
    """
    children = np.random.SeedSequence(seed).spawn(CHUNKS)
    counts = [total // CHUNKS + (i < total % CHUNKS) for i in range(CHUNKS)]
    jobs = [(int(c.generate_state(1)[0]), k) for c, k in zip(children, counts) if k]
    workers = min(threads(), len(jobs)) or 1
    if workers == 1:
        return [fn(s, k, *args) for s, k in jobs]
    with ProcessPoolExecutor(workers) as pool:
        futures = [pool.submit(fn, s, k, *args) for s, k in jobs]
        return [f.result() for f in futures]


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _rule(args) -> ClusteringRule:
    if getattr(args, "rule", None):
        rule = ClusteringRule.from_json(_load_json(args.rule))
    else:
        rule = make_clustering_rule(args.N, args.d2, args.eps)
    ok, bad = validate_rule(rule)
    if not ok:
        raise InputError("invalid clustering rule: " + "; ".join(bad))
    return rule


def _json_safe(x):
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# suites ------------------------------------------------------------------------

def cmd_cluster(args):
    rule = _rule(args)
    if args.points:
        pts = _load_json(args.points)
        config = Configuration.from_points(pts)
    else:
        rng = np.random.default_rng(args.seed)
        config = random_configuration(rng, args.n, args.dim)
    dec = clustering.finest_decomposition(config, rule)
    greedy = clustering.greedy_cluster_decompose(config, rule)
    result = {"points": [list(p) for p in config.points], "mult": list(config.mult),
              "finest": [[list(p) for p in part.points] for part in dec.parts],
              "greedy_parts": len(greedy.parts), "rule": rule.to_json()}
    return "PASS", result


def cmd_boxes(args):
    xs = [float(x) for x in _load_json(args.points)] if args.points else \
        list(boxcover.random_line_configuration(np.random.default_rng(args.seed), args.n))
    params = boxcover.BoxParams.uniform(len(xs), args.b)
    dec = boxcover.box_decompose(xs, params.b)
    brute = boxcover.brute_force_box_decompositions(xs, params.b) if len(xs) <= 12 else None
    unique = brute is None or brute == [dec.runs]
    result = {"xs": xs, "params": params.to_json(), "runs": [list(r) for r in dec.runs],
              "boxes": [[bx.center, bx.halfwidth] for bx in dec.boxes],
              "rho": [boxcover.rho(xs, params, k) for k in range(len(xs) + 1)],
              "witness": boxcover.cover_witness(xs, params), "unique": unique}
    return "PASS" if unique else "FAIL", result


def _cover_chunk(seed, count, n, margin):
    rng = np.random.default_rng(seed)
    params = boxcover.BoxParams.uniform(n)
    hist = [0] * (n + 1)
    failures, disagreements, skipped = [], [], 0
    for _ in range(count):
        xs = boxcover.random_line_configuration(rng, n)
        try:
            hist[boxcover.cover_witness(xs, params)] += 1
        except InvariantViolation as exc:
            failures.append({"xs": xs.tolist(), "error": str(exc)})
        for k in range(n + 1):
            agree = boxcover.membership_agreement(xs, params, k, margin)
            if agree is None:
                skipped += 1
            elif not agree:
                disagreements.append({"xs": xs.tolist(), "k": k, "rho": boxcover.rho(xs, params, k)})
    return hist, failures, disagreements, skipped


def cmd_cover_check(args):
    parts = _chunked(_cover_chunk, args.seed, args.samples, args.n, args.margin)
    hist = [sum(p[0][k] for p in parts) for k in range(args.n + 1)]
    failures = [f for p in parts for f in p[1]]
    disagreements = [d for p in parts for d in p[2]]
    skipped = sum(p[3] for p in parts)
    checked = args.samples * (args.n + 1)
    result = {"witness_histogram": hist, "failures": failures[:20], "failure_count": len(failures),
              "disagreements": disagreements[:20], "disagreement_count": len(disagreements),
              "skipped": skipped, "checked": checked}
    if failures or disagreements:
        return "FAIL", result
    if skipped > args.max_skip * checked:
        return "INCONCLUSIVE", result
    return "PASS", result


def _anti_psh(z):
    return -float(np.sum(np.abs(z) ** 2))


def cmd_psh_check(args):
    rule = _rule(args)
    if args.fixture == "anti":
        f = _anti_psh
        t = None
    else:
        t = args.t if args.t else 0.9 * potentials.SmoothedPotential(rule, 1.0).eps(args.n)
        sp = potentials.SmoothedPotential(rule, t)
        sp.check(args.n)
        f = potentials.smoothed_lift(sp) if args.fixture == "smoothed" else \
            (lambda z: potentials.phi_n(Configuration.from_complex(z)))
    spec = potentials.DiskSampleSpec(args.n, args.samples, args.seed, scale=(args.scale_lo, args.scale_hi))
    rep = potentials.psh_check(f, spec, tol=args.tol)
    result = rep.to_json()
    result["failures"] = result["failures"][:20]
    result.update(fixture=args.fixture, t=t)
    return "PASS" if rep.passed else "FAIL", result


def cmd_sectorial_check(args):
    params = boxcover.BoxParams.uniform(args.n)
    cuts = [int(c) for c in args.cuts.split(",")] if args.cuts else [args.n // 2]
    specs = [sector.WitnessSpec(params, k, h=args.h) for k in cuts]
    if len(specs) == 1:
        samples = sector.boundary_samples(specs[0], args.samples, args.seed)
    else:
        samples = sector.joint_boundary_samples(specs, args.samples, args.seed)
    reports = {"transversality": sector.transversality_check(specs, samples.points, args.tol, samples.notes)}
    for s in specs:
        reports[f"bracket_{s.k}"] = sector.bracket_check(s, samples.points, args.tol)
    result = {k: v.to_json() for k, v in reports.items()}
    result["notes"] = samples.notes[:20]
    if len(specs) > 1:
        result["commuting_brackets"] = sector.commuting_bracket_report(specs, samples.points[:20])
    statuses = {r.status for r in reports.values()}
    if "FAIL" in statuses:
        return "FAIL", result
    if "INCONCLUSIVE" in statuses or len(samples.points) < args.samples * (1 - args.max_skip):
        return "INCONCLUSIVE", result
    return "PASS", result


def cmd_nerve(args):
    gluing = nerve.GluingDescriptor(strips=args.strips)
    certs = {n: nerve.match_bar_cech(gluing, n, args.samples, args.seed) for n in range(args.nmax + 1)}
    result = {"matches": {str(n): c.to_json() for n, c in certs.items()}}
    if args.dot:
        Path(args.dot).write_text(nerve.build_cech_poset(args.nmax).to_dot("cech"))
    if args.pipeline:
        T = catcomplex.trinion_model()
        M = catcomplex.random_bimodule(np.random.default_rng(args.seed), args.pipeline + 1, 2)
        res = nerve.corner_cut_pipeline(args.pipeline, catcomplex.TrinionFactors(T, M))
        result["pipeline"] = res.to_json()
        if not res.reproduces_pushout_shape():
            return "FAIL", result
    return "PASS" if all(c.passed for c in certs.values()) else "FAIL", result


def cmd_homology_glue(args):
    left = homology.SurfaceDescriptor.parse(args.left)
    right = homology.SurfaceDescriptor.parse(args.right)
    rep = homology.verify_gluing(left, right, args.nmax, strips=args.strips, bar_nmax=args.bar_nmax)
    return "PASS" if rep.passed else "FAIL", rep.to_json()


def cmd_totalize(args):
    V = catcomplex.ChainComplex.from_json(_load_json(args.left))
    W = catcomplex.ChainComplex.from_json(_load_json(args.right))
    T = catcomplex.totalize(V, W)
    result = {"total": T.to_json(), "homology": T.homology(),
              "semicohomology": catcomplex.semicohomology(T)}
    return "PASS", result


def _module_from_json(data) -> catcomplex.WeightedModule:
    try:
        lo = int(data.get("lo", 0))
        dims = [int(x) for x in data["dims"]]
        raw = [data["eps1"], data["eps2"]]
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed module: {exc}") from exc
    gens = []
    for mats in raw:
        if len(mats) != max(len(dims) - 1, 0):
            raise InputError("need one action matrix between consecutive weights")
        gens.append({lo + i: catcomplex.la.mat(m, cols=dims[i]) if m else
                     catcomplex.la.zeros(dims[i + 1], dims[i]) for i, m in enumerate(mats)})
    return catcomplex.epsilon_bimodule({lo + i: d for i, d in enumerate(dims)}, gens[0], gens[1])


def cmd_pushout(args):
    if args.module:
        M = _module_from_json(_load_json(args.module))
    else:
        M = catcomplex.random_bimodule(np.random.default_rng(args.seed), 5, 4)
    T = catcomplex.trinion_model()
    ns = [args.n] if args.n else [w + 1 for w in M.weights()]
    reps = [catcomplex.pushout_formula(T, M, n) for n in ns]
    result = {"module_dims": {str(w): M.dim(w) for w in M.weights()},
              "pushouts": [r.to_json() for r in reps], "trinion": catcomplex.delta_tensor_check(T)}
    return "PASS" if all(r.isomorphism for r in reps) else "FAIL", result


# rendering ---------------------------------------------------------------------

def render(report: dict) -> str:
    """Human-readable summary of a report (header only when there is no result)."""
    man = report.get("manifest", {})
    out = [f"symsector {man.get('subcommand', '?')}  status={report.get('status', '?')}  "
           f"version={man.get('version', '?')}"]
    res = report.get("result") or {}
    if "witness_histogram" in res:
        out.append("k  count")
        out.extend(f"{k}  {c}" for k, c in enumerate(res["witness_histogram"]))
    if "table" in res:
        out.append("n  q  computed  oracle")
        out.extend(f"{r['n']}  {r['q']}  {r['computed']}  {r['oracle']}" for r in res["table"])
    if "min_margin" in res:
        out.append(f"min margin {res['min_margin']}  samples {res['samples']}  "
                   f"failures {len(res['failures'])}")
    if "pushouts" in res:
        out.extend(f"n={p['n']} dim={p['pushout_dim']} iso={p['isomorphism']}" for p in res["pushouts"])
    return "\n".join(out) + "\n"


def render_csv(report: dict) -> str | None:
    res = report.get("result") or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "witness_histogram" in res:
        w.writerow(["k", "count"])
        w.writerows(enumerate(res["witness_histogram"]))
    elif "table" in res:
        w.writerow(["n", "q", "computed", "oracle"])
        w.writerows((r["n"], r["q"], r["computed"], r["oracle"]) for r in res["table"])
    else:
        return None
    return buf.getvalue()


def cmd_report(args):
    report = _load_json(args.input)
    if not isinstance(report, dict) or report.get("schema") != SCHEMA:
        raise InputError(f"not a {SCHEMA} report")
    sys.stdout.write(render(report))
    if args.csv:
        text = render_csv(report)
        if text is None:
            raise InputError("this report has no tabular data")
        Path(args.csv).write_text(text)
    return None, None


# parser ------------------------------------------------------------------------

def _add_rule(p):
    p.add_argument("--rule", help="JSON file with a clustering rule {'r': [...], 'd': [...]}")
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--d2", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symsector", description=__doc__.splitlines()[0])
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="finest cluster decomposition")
    _add_rule(p)
    p.add_argument("--points", help="JSON file holding a list of points")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("boxes", help="box decomposition of points on the line")
    p.add_argument("--points", help="JSON file holding a list of reals")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--b", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_boxes)

    p = sub.add_parser("cover-check", help="cover property and rho/box agreement on random samples")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin", type=float, default=1e-6)
    p.add_argument("--max-skip", type=float, default=0.01)
    p.set_defaults(func=cmd_cover_check)

    p = sub.add_parser("psh-check", help="plurisubharmonicity of the smoothed potential")
    _add_rule(p)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--t", type=float)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--scale-lo", type=float, default=1e-2)
    p.add_argument("--scale-hi", type=float, default=3.0)
    p.add_argument("--fixture", choices=("smoothed", "phi", "anti"), default="smoothed")
    p.set_defaults(func=cmd_psh_check)

    p = sub.add_parser("sectorial-check", help="bracket and transversality on cover boundaries")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--cuts", help="comma-separated cut indices")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-skip", type=float, default=0.2)
    p.set_defaults(func=cmd_sectorial_check)

    p = sub.add_parser("nerve", help="bar/Cech matching and the corner-cut pipeline")
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--strips", type=int, default=1)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dot", help="write the Cech poset of degree nmax as DOT")
    p.add_argument("--pipeline", type=int, default=0, help="also run the corner-cut pipeline in this degree")
    p.set_defaults(func=cmd_nerve)

    p = sub.add_parser("homology-glue", help="derived tensor against the glued-surface oracle")
    p.add_argument("--left", default="g=0")
    p.add_argument("--right", default="g=0")
    p.add_argument("--strips", type=int, default=1)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--bar-nmax", type=int, default=-1)
    p.set_defaults(func=cmd_homology_glue)

    p = sub.add_parser("totalize", help="coproduct totalization of two complexes")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(func=cmd_totalize)

    p = sub.add_parser("pushout", help="pushout formula against the relative tensor product")
    p.add_argument("--module", help="module JSON {'lo', 'dims', 'eps1', 'eps2'}")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pushout)

    p = sub.add_parser("report", help="render a saved report")
    p.add_argument("input")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_report)
    return parser


def _params(args) -> dict:
    skip = {"func", "out", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = {"subcommand": args.command, "params": _params(args), "version": _version(),
                "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}
    try:
        status, result = args.func(args)
    except InputError as exc:
        status, result = "INPUT_ERROR", {"error": str(exc)}
    if status is None:
        return EXIT_OK
    report = {"schema": SCHEMA, "manifest": manifest, "status": status, "result": _json_safe(result)}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return {"PASS": EXIT_OK, "FAIL": EXIT_FAIL, "INPUT_ERROR": EXIT_INPUT,
            "INCONCLUSIVE": EXIT_INCONCLUSIVE}[status]


if __name__ == "__main__":
    sys.exit(main())
