"""Command line front end: fixtures in, deterministic JSON (and CSV) reports out.

Every report carries its expectations with tolerance and pass flag; the exit
code is 0 iff all of them pass. Timings go to a sidecar file so that the
report itself is byte-identical across runs with the same seed.
"""
import argparse
import csv
import hashlib
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import ale_deformation as ale
from . import crystallographic as cr
from . import flat_orbifold as fo
from . import fueter as fu
from . import linalg as la
from . import pipeline as pl

DEFAULT_TOLERANCES = {
    "richardson_min": 3.5,
    "richardson_max": 4.5,
    "decay_slope_max": -2.9,
    "hk_residual": 1e-6,
    "fourier_factor": 1.05,
    "sweep_spread": 1.10,
    "contraction_residual": 1e-12,
    "selfadjoint": 1e-10,
}

NAMED_ROTATIONS = {"R2": cr.R2, "R+": cr.RPLUS, "R-": cr.RMINUS}


class FixtureParseError(ValueError):
    pass


# ---------------------------------------------------------------- plumbing

def jsonable(x):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return x


def canonical(obj):
    return json.dumps(jsonable(obj), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def fixture_dir():
    return Path(str(resources.files("kummer_assoc") / "fixtures"))


def resolve_fixture(arg):
    p = Path(arg)
    if p.exists():
        return p
    cand = fixture_dir() / (arg if arg.endswith(".json") else arg + ".json")
    if cand.exists():
        return cand
    raise FileNotFoundError("fixture %r not found (neither a path nor a shipped tag)" % arg)


def load_fixture(arg):
    path = resolve_fixture(arg)
    raw = path.read_bytes()
    try:
        data = json.loads(raw.decode("utf-8"))
    except json.JSONDecodeError as e:
        raise FixtureParseError("%s: line %d, column %d: %s" % (path, e.lineno, e.colno, e.msg)) from None
    if not isinstance(data, dict):
        raise FixtureParseError("%s: top level must be an object" % path)
    return data, {"path": path.name, "tag": data.get("tag", path.stem), "sha256": hashlib.sha256(raw).hexdigest()}


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp-", suffix=path.suffix)
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    os.replace(tmp, path)


def write_csv(path, rows):
    if not rows:
        return
    keys = sorted({k for r in rows for k in r})
    fd, tmp = tempfile.mkstemp(dir=str(Path(path).parent), prefix=".tmp-", suffix=".csv")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
        w = csv.DictWriter(f, fieldnames=keys)
        w.writeheader()
        for r in rows:
            w.writerow({k: jsonable(r.get(k, "")) for k in keys})
    os.replace(tmp, path)


class Checks:
    def __init__(self):
        self.items = []

    def exact(self, name, expected, actual):
        self.items.append({"name": name, "expected": jsonable(expected), "actual": jsonable(actual),
                           "tolerance": "exact", "pass": jsonable(expected) == jsonable(actual)})

    def bound(self, name, actual, lo=None, hi=None):
        ok = (lo is None or actual >= lo) and (hi is None or actual <= hi)
        self.items.append({"name": name, "actual": jsonable(actual), "tolerance": {"min": lo, "max": hi},
                           "pass": bool(ok)})

    def flag(self, name, ok, detail=""):
        self.items.append({"name": name, "actual": detail, "tolerance": "boolean", "pass": bool(ok)})

    @property
    def passed(self):
        return all(i["pass"] for i in self.items)


def parse_tolerances(pairs):
    tol = dict(DEFAULT_TOLERANCES)
    for p in pairs or []:
        if "=" not in p:
            raise ValueError("--tolerance expects key=value, got %r" % p)
        k, v = p.split("=", 1)
        if k not in tol:
            raise ValueError("unknown tolerance %r (known: %s)" % (k, ", ".join(sorted(tol))))
        tol[k] = float(v)
    return tol


def rotation_arg(r):
    if isinstance(r, str):
        if r not in NAMED_ROTATIONS:
            raise ValueError("unknown rotation %r" % r)
        return NAMED_ROTATIONS[r]
    return pl.rotation_of(r)


# ---------------------------------------------------------------- commands

def cmd_enumerate_bieberbach(args, tol, fixtures):
    checks = Checks()
    groups = []
    for cls in cr.CLASSES:
        G = cr.make_bieberbach(cls)
        ok, witness = cr.torsion_free_check(G)
        checks.flag("torsion-free %s" % cls, ok, "witness %s" % (witness,) if not ok else "")
        axes = []
        for cand in cr.eligible_axes(G, height=1):
            b = cr.base_orbifold(G, cand.xi)
            axes.append({"xi": [int(x) for x in cand.xi], "signs": list(cand.signs),
                         "central": cr.is_central(cand.xi, G), "base": b.to_json()})
        groups.append({"group": G.to_json(), "torsion_free": ok, "axes": axes})
    for (cls, xi), (nf, iso, topo) in sorted(cr.REFERENCE_TABLE.items()):
        b = cr.base_orbifold(cr.make_bieberbach(cls), xi)
        checks.exact("base orbifold %s xi=%s" % (cls, list(xi)),
                     {"n_f": nf, "isotropy": iso, "topology": topo},
                     {"n_f": b.n_f, "isotropy": b.isotropy_orders, "topology": b.topology})
        checks.exact("orbifold Euler characteristic %s xi=%s" % (cls, list(xi)), Fraction(0), b.euler_orbifold())
    return {"groups": groups}, checks, []


def cmd_singular_set(args, tol, fixtures):
    data, _ = fixtures[0]
    orb = data["orbifold"]
    if orb.get("kind") != "t7":
        raise FixtureParseError("singular-set needs an orbifold of kind t7")
    G, ss, lam = pl.t7_setup(orb)
    res = {"components": [c.to_json() for c in ss.components], "strata": ss.strata(), "flags": ss.flags,
           "elements": len(ss.elements),
           "local_models": {c.id: fo.local_model(c, ss).to_json() for c in ss.components},
           "phi_preserved": {g.name: fo.preserves_phi(g) for g in G.generators}}
    checks = Checks()
    exp = data.get("expect", {})
    if "components" in exp:
        checks.exact("component count", exp["components"], len(ss.components))
    if "strata" in exp:
        checks.exact("strata", exp["strata"], ss.strata())
    if "isotropy" in exp:
        checks.exact("isotropy", [exp["isotropy"]] * len(ss.components), [c.isotropy for c in ss.components])
    if "dimension" in exp:
        checks.exact("dimension", [exp["dimension"]] * len(ss.components), [c.dimension for c in ss.components])
    checks.exact("intersection flags", [], ss.flags)
    if lam is not None:
        act = fo.symmetry_action_on_components(G, lam, ss)
        res["symmetry"] = act.to_json()
        res["symmetry"]["phi_preserved"] = fo.preserves_phi(lam)
        # action on the fixed tori in T^7 (before identifying by G)
        tori = [ft for c in ss.components for ft in c.orbit]
        keys = {ft.key for ft in tori}
        moved = sum(1 for ft in tori if ft.image(lam).key != ft.key)
        res["symmetry"]["tori_in_cover"] = len(tori)
        res["symmetry"]["tori_moved_in_cover"] = moved
        res["symmetry"]["tori_closed"] = all(ft.image(lam).key in keys for ft in tori)
        if "symmetry_fixed" in exp:
            checks.exact("symmetry fixes", sorted(exp["symmetry_fixed"]),
                         sorted(k for k in act.fixed if k in exp["symmetry_fixed"]))
        if "symmetry_paired" in exp:
            checks.exact("components paired by the symmetry", exp["symmetry_paired"],
                         sum(len(c) for c in act.cycles))
    return res, checks, []


def _families(entry, rs, W, comps):
    """Match reference subspaces against solver components up to W."""
    out, used = [], set()
    for fam in entry.get("reference", []):
        subs = []
        for basis in fam["subspaces"]:
            b = [ale.flatten(la.mat(m)) for m in basis]
            orbit = ale.weyl_orbit_keys(b, rs, W)
            hit = [k for k, c in enumerate(comps) if ale.same_family(b, c, rs, W, orbit)]
            used.update(hit)
            subs.append({"dim": len(la.span_key(b, 3 * rs.dim)), "matched": hit,
                         "fixed": _generic_fixed(b, entry, rs, W),
                         "wall_bound": bool(ale._walls_containing(la.span_key(b, 3 * rs.dim), rs))})
        out.append({"name": fam["name"], "subspaces": subs, "matched": all(s["matched"] for s in subs)})
    return out, used


def _generic_fixed(basis, entry, rs, W):
    n = rs.dim
    coeffs = [Fraction(p) for p in (2, 3, 5, 7, 11, 13, 17, 19)[:len(basis)]]
    z = ale._unflatten(tuple(sum((c * v[a] for c, v in zip(coeffs, basis)), Fraction(0)) for a in range(3 * n)), n)
    return ale.is_fixed([rotation_arg(r) for r in entry["rotations"]], z, rs, W)


def cmd_fixed_locus(args, tol, fixtures):
    entries = []
    if args.gamma:
        entries.append({"gamma": args.gamma, "rotations": args.rotations.split(",") if args.rotations else []})
    for data, _ in fixtures:
        entries.extend(data.get("fixed_locus", []))
    if not entries:
        raise FixtureParseError("no fixed-locus problem given (use --fixture or --gamma/--rotations)")
    checks = Checks()
    out = []
    for entry in entries:
        rs = ale.root_system(entry["gamma"])
        W = ale.weyl_group(rs)
        rots = [rotation_arg(r) for r in entry["rotations"]]
        comps = ale.fixed_locus(rots, rs, W)
        label = "%s under %s" % (rs.label, ",".join(str(r) for r in entry["rotations"]))
        rep = ale.sample_outside(rots, rs, comps, samples=args.samples, seed=args.seed, W=W)
        checks.exact("sampled fixed points outside the solver union (%s)" % label, 0, rep.outside)
        item = {"gamma": rs.label, "weyl_order": len(W), "rotations": entry["rotations"],
                "components": [c.to_json() | {"orbit_size": c.orbit_size} for c in comps],
                "oracle": rep.to_json()}
        if "reference" in entry:
            fams, used = _families(entry, rs, W, comps)
            item["reference"] = fams
            for f in fams:
                detail = "; ".join("dim %d matched %s fixed %s on-wall %s" % (x["dim"], x["matched"], x["fixed"], x["wall_bound"])
                                   for x in f["subspaces"])
                checks.flag("reference family matched (%s): %s" % (label, f["name"]), f["matched"], detail)
            extra = [k for k in range(len(comps)) if k not in used and not comps[k].wall_bound]
            item["unmatched_components"] = extra
            checks.exact("off-wall solver components outside the reference (%s)" % label, [], extra)
        out.append(item)
    return {"problems": out}, checks, []


def balanced_config(rng, k):
    """k+1 distinct integer charges shifted to exact balance."""
    while True:
        pts = [tuple(int(x) for x in rng.integers(-5, 6, size=3)) for _ in range(k + 1)]
        if len(set(pts)) == k + 1:
            break
    mean = [Fraction(sum(p[a] for p in pts), k + 1) for a in range(3)]
    return [tuple(Fraction(p[a]) - mean[a] for a in range(3)) for p in pts]


def cmd_verify_gh(args, tol, fixtures):
    rng = np.random.default_rng(args.seed)
    checks = Checks()
    csv_rows = []
    mono = ale.gh_form_closedness([(0, 0, 0)], (0.3, 0.4, 0.5), 1e-3)
    checks.bound("single monopole: curl A + grad V", mono.curl_residual, hi=tol["hk_residual"])
    checks.bound("single monopole: ω_r ∧ ω_s - 2δ V vol", mono.wedge_residual, hi=tol["hk_residual"])
    configs = []
    for idx in range(20):
        k = (2, 3, 4)[idx % 3]
        z = balanced_config(rng, k)
        ale.check_balanced(z)
        fit = ale.gh_decay_exponent(z)
        q = _probe(rng, z)
        ladder = [1e-1 / 2 ** a for a in range(4)]
        vals = [ale.gh_harmonicity_residual(z, q, h) for h in ladder]
        ratios = [float(r) for r in ale.richardson_ratios(vals)]
        checks.bound("config %d (k=%d) decay slope" % (idx, k), float(fit.slope), hi=tol["decay_slope_max"])
        for j, r in enumerate(ratios):
            checks.bound("config %d harmonicity ratio %d" % (idx, j), r, lo=tol["richardson_min"], hi=tol["richardson_max"])
        configs.append({"k": k, "charges": z, "probe": list(q), "decay": fit.to_json(),
                        "harmonicity": [float(v) for v in vals], "ratios": ratios})
        for r_, v in zip(fit.radii, fit.values):
            csv_rows.append({"config": idx, "k": k, "radius": float(r_), "rms_deviation": float(v)})
    res = {"monopole": mono.to_json(), "configs": configs}
    return res, checks, [("decay", csv_rows)]


def _probe(rng, z):
    pts = np.array([[float(x) for x in p] for p in z])
    while True:
        q = rng.uniform(-3, 3, size=3)
        if np.min(np.linalg.norm(pts - q, axis=1)) > 0.75:
            return tuple(float(x) for x in q)


def _count_inputs(args, fixtures):
    if args.orbifold or args.resolution:
        if not (args.orbifold and args.resolution):
            raise FixtureParseError("--orbifold and --resolution go together")
        od, oi = load_fixture(args.orbifold)
        rd, ri = load_fixture(args.resolution)
        fixtures.extend([(od, oi), (rd, ri)])
        orb = od.get("orbifold", od)
        res = rd.get("resolution", rd)
        exp = rd.get("expect", od.get("expect", {}))
        return orb, res, exp
    data, _ = fixtures[0]
    return data["orbifold"], data["resolution"], data.get("expect", {})


def cmd_count_associatives(args, tol, fixtures):
    orb, res_json, exp = _count_inputs(args, fixtures)
    comps, choices = pl.from_fixture(orb, res_json)
    checks = Checks()
    r41 = pl.count_orbifold_points(comps, choices, strict_centrality=args.strict_centrality)
    out = {"orbifold_fixed_points": r41.to_json(), "choices": [c.to_json() for c in choices],
           "components": [{"id": c.id, "gamma": c.gamma, "class": c.group.cls, "multiplicity": c.multiplicity,
                           "notes": c.notes} for c in comps],
           "counts_are": "lower bounds (at least)"}
    result = r41
    if orb.get("kind") == "t7":
        r48 = pl.count_equivariant(comps, choices)
        out["k_equivariant_exact"] = r48.to_json()
        if exp.get("mechanism") == pl.EQUIVARIANT:
            result = r48
    if "total" in exp:
        checks.exact("guaranteed total (%s)" % exp.get("mechanism", pl.ORBIFOLD_POINTS), exp["total"], result.total)
    for cid, v in sorted(exp.get("per_component", {}).items()):
        checks.exact("guaranteed count for %s" % cid, v, result.per_component.get(cid))
    out["guaranteed_total"] = result.total
    out["mechanism"] = exp.get("mechanism", pl.ORBIFOLD_POINTS)
    return out, checks, []


def cmd_fueter_demo(args, tol, fixtures):
    checks = Checks()
    op = fu.two_block_model(seed=args.seed)
    rows, spread = fu.sweep_L(op.A, trials=args.trials, seed=args.seed)
    checks.bound("(L+1)-normalized constant spread max/min", spread, hi=tol["sweep_spread"])
    for r in rows:
        checks.bound("L=%g: L2 ratio / Fourier oracle" % r.L, r.c_l2 / r.oracle_l2, hi=tol["fourier_factor"])
    kd = fu.kernel_dimension(op)
    checks.exact("kernel dimension", 2, kd)
    sa = fu.selfadjointness_residual(op)
    checks.bound("self-adjointness residual", sa, hi=tol["selfadjoint"])
    p = fu.ContractionProblem(seed=args.seed)
    sweep = fu.t_sweep(p)
    ok_rows = [r for r in sweep if r["status"] == "ok"]
    checks.flag("sweep has runs below the threshold", len(ok_rows) >= 3, "%d runs" % len(ok_rows))
    for r in ok_rows:
        checks.bound("t=%g: |v| / t^(β-γ) ≤ 2 c_E" % r["t"], r["scaled"], hi=2 * p.c_E)
        checks.bound("t=%g: max step ratio ≤ Lipschitz bound" % r["t"], r["max_ratio"], hi=r["lipschitz_bound"])
    bad = fu.ContractionProblem(c1=50.0, c2=5.0, c3=5.0, t=1.0, seed=args.seed)
    try:
        fu.contraction_solve(bad, force=True)
        detected, ratio = False, None
    except fu.ContractionFailure as e:
        detected, ratio = True, e.ratio
    checks.flag("out-of-regime run reported as non-contractive", detected, "measured ratio %s" % ratio)
    scal = []
    for a, b in ((0.3, 0.5), (1.0, 0.1), (-0.2, 0.7), (0.05, 2.0)):
        v, root, trace = fu.scalar_quadratic(a, b)
        checks.bound("scalar v = %g - %g v^2" % (a, b), abs(v - root), hi=tol["contraction_residual"])
        scal.append({"a": a, "b": b, "iterate": v, "closed_form": float(root), "iterations": len(trace)})
    res = {"operator": {"eigenvalues": op.eigvals, "kernel_dim": kd},
           "L_sweep": [r.to_json() for r in rows], "spread": spread, "selfadjoint_residual": sa,
           "contraction": {"c1": p.c1, "c2": p.c2, "c3": p.c3, "beta": p.beta, "gamma": p.gamma,
                           "c_E": p.c_E, "threshold": fu.threshold(p), "sweep": sweep},
           "out_of_regime": {"detected": detected, "ratio": ratio}, "scalar": scal}
    return res, checks, [("L-sweep", [r.to_json() for r in rows]), ("t-sweep", sweep)]


def catalog(directory=None):
    directory = Path(directory) if directory else fixture_dir()
    out = {}
    for p in sorted(directory.glob("*.json")):
        data = json.loads(p.read_text(encoding="utf-8"))
        tag = data.get("tag", p.stem)
        if tag in out:
            raise ValueError("duplicate fixture tag %r (%s and %s)" % (tag, out[tag]["file"], p.name))
        out[tag] = {"file": p.name, "headline": data.get("headline"), "summary": data.get("summary", ""),
                    "expect": data.get("expect", {})}
    return out


def cmd_list_examples(args, tol, fixtures):
    cat = catalog(args.fixture_dir)
    return {"examples": cat}, Checks(), []


COMMANDS = {
    "enumerate-bieberbach": cmd_enumerate_bieberbach,
    "singular-set": cmd_singular_set,
    "fixed-locus": cmd_fixed_locus,
    "verify-gh": cmd_verify_gh,
    "count-associatives": cmd_count_associatives,
    "fueter-demo": cmd_fueter_demo,
    "list-examples": cmd_list_examples,
}

NEEDS_FIXTURE = {"singular-set"}


def build_parser():
    ap = argparse.ArgumentParser(prog="kummer-assoc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--fixture", action="append", default=[], help="fixture path or shipped tag (see list-examples)")
        sp.add_argument("--out", help="output directory for the JSON (and CSV) report")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--csv", action="store_true", help="also write CSV ladders and sweeps")
        sp.add_argument("--tolerance", action="append", default=[], metavar="KEY=VALUE")
        if name == "count-associatives":
            sp.add_argument("--orbifold")
            sp.add_argument("--resolution")
            sp.add_argument("--strict-centrality", action="store_true",
                            help="require ξ central instead of Zξ normal")
        if name == "fixed-locus":
            sp.add_argument("--gamma")
            sp.add_argument("--rotations", help="comma separated: R2, R+, R-")
            sp.add_argument("--samples", type=int, default=10000)
        if name == "fueter-demo":
            sp.add_argument("--trials", type=int, default=200)
        if name == "list-examples":
            sp.add_argument("--fixture-dir")
    return ap


def run(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        tol = parse_tolerances(args.tolerance)
        fixtures = [load_fixture(f) for f in args.fixture]
        if args.command in NEEDS_FIXTURE and not fixtures:
            raise FixtureParseError("%s needs --fixture" % args.command)
        if args.command == "count-associatives" and not fixtures and not args.orbifold:
            raise FixtureParseError("count-associatives needs --fixture or --orbifold/--resolution")
        t0 = time.perf_counter()
        results, checks, tables = COMMANDS[args.command](args, tol, fixtures)
        elapsed = time.perf_counter() - t0
    except (FixtureParseError, FileNotFoundError, KeyError, ValueError, pl.LiftDataUnavailable) as e:
        msg = "error: %s" % (e.args[0] if isinstance(e, KeyError) and False else e)
        if isinstance(e, KeyError):
            msg = "error: fixture is missing the field %s" % e
        print(msg, file=sys.stderr)
        return 2
    report = {
        "command": args.command,
        "config": {"seed": args.seed, "tolerances": tol, "csv": bool(args.csv)},
        "fixtures": [info for _, info in fixtures],
        "provenance": sorted({info["tag"] for _, info in fixtures}),
        "results": results,
        "expectations": checks.items,
        "passed": checks.passed,
    }
    body = canonical(report)
    report["digest"] = hashlib.sha256(body.encode("utf-8")).hexdigest()
    text = canonical(report)
    stem = args.command + ("-" + "-".join(report["provenance"]) if report["provenance"] else "")
    if args.out:
        out = Path(args.out)
        write_atomic(out / (stem + ".json"), text)
        write_atomic(out / (stem + ".timings.json"), canonical({"seconds": round(elapsed, 6)}))
        if args.csv:
            for name, rows in tables:
                write_csv(out / ("%s-%s.csv" % (stem, name)), rows)
    else:
        sys.stdout.write(text)
    failed = [i for i in checks.items if not i["pass"]]
    for i in failed:
        print("FAILED %s: expected %s, got %s" % (i["name"], i.get("expected", "pass" if i["tolerance"] == "boolean" else i["tolerance"]), i["actual"]),
              file=sys.stderr)
    print("%s: %d expectations, %d failed, %.2f s" % (args.command, len(checks.items), len(failed), elapsed),
          file=sys.stderr)
    return 0 if checks.passed else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
