"""Acceptance suite: one test and one summary line per criterion.

Expected values and tolerances are pinned here rather than read from the
shipped fixtures, so a fixture edit cannot move the goalposts.
"""
import json
import random
import time
from fractions import Fraction as F

import numpy as np
import pytest

from kummer_assoc import ale_deformation as ale
from kummer_assoc import crystallographic as cr
from kummer_assoc import fueter as fu
from kummer_assoc import linalg as la
from kummer_assoc import pipeline as pl
from kummer_assoc import quaternion as qa
from kummer_assoc.cli import balanced_config, fixture_dir


def report(acceptance, n, ok, detail):
    acceptance[n] = (bool(ok), detail)
    print("criterion %d: %s  %s" % (n, "PASS" if ok else "FAIL", detail))
    assert ok, detail


def fixture(tag):
    return json.loads((fixture_dir() / (tag + ".json")).read_text())


# ---------------------------------------------------------------- 1

COUNTS = {"c2-a1": 4, "c2-a2": 8, "c2c2-a1": 32, "c2c2-a3-d4": {"C4": 4, "Dic2": 8}, "t7-involutions": 12}


def test_criterion_1_example_counts(acceptance):
    t0 = time.perf_counter()
    got = {}
    for tag, want in COUNTS.items():
        d = fixture(tag)
        comps, choices = pl.from_fixture(d["orbifold"], d["resolution"])
        res = pl.count_equivariant(comps, choices) if tag == "t7-involutions" else pl.count_orbifold_points(comps, choices)
        got[tag] = dict(res.per_component) if isinstance(want, dict) else res.total
    dt = time.perf_counter() - t0
    ok = got == COUNTS and dt < 5
    report(acceptance, 1, ok, "counts %s in %.2f s" % (got, dt))


# ---------------------------------------------------------------- 2

def test_criterion_2_singular_set_t7(acceptance):
    t0 = time.perf_counter()
    G, ss, lam = pl.t7_setup(fixture("t7-involutions")["orbifold"])
    from kummer_assoc import flat_orbifold as fo
    act = fo.symmetry_action_on_components(G, lam, ss)
    dt = time.perf_counter() - t0
    a1 = sorted(c.id for c in ss.components if c.stratum == "A1")
    paired = sum(len(c) for c in act.cycles)
    checks = {
        "12 components": len(ss.components) == 12,
        "3-tori": all(c.dimension == 3 for c in ss.components),
        "isotropy C2": all(c.isotropy == "C2" for c in ss.components),
        "strata 4+4+4": ss.strata() == {"A1": 4, "A2": 4, "A3": 4},
        "lambda fixes A1": all(x in act.fixed for x in a1) and len(a1) == 4,
        "lambda pairs 8": paired == 8,
        "< 5 s": dt < 5,
    }
    bad = [k for k, v in checks.items() if not v]
    report(acceptance, 2, not bad, "failed: %s (lambda fixes %d, pairs %d) in %.2f s" % (bad, len(act.fixed), paired, dt)
           if bad else "all 7 checks in %.2f s" % dt)


# ---------------------------------------------------------------- 3

TABLE = {
    ("C2", (1, 0, 0)): (4, [2, 2, 2, 2]),
    ("C2", (0, 1, 0)): (0, []),
    ("C3", (1, 0, 0)): (3, [3, 3, 3]),
    ("C4", (1, 0, 0)): (3, [4, 4, 2]),
    ("C6", (1, 0, 0)): (3, [6, 3, 2]),
    ("C2^2", (1, 0, 0)): (2, [2, 2]),
}


def test_criterion_3_base_orbifold_table(acceptance):
    got = {}
    for (cls, xi) in TABLE:
        b = cr.base_orbifold(cr.make_bieberbach(cls), xi)
        got[(cls, xi)] = (b.n_f, b.isotropy_orders)
    klein = cr.base_orbifold(cr.make_bieberbach("C2"), (0, 1, 0)).topology == "klein-bottle"
    ok = got == TABLE and klein
    report(acceptance, 3, ok, "n_f/isotropy %s, C2 second axis Klein bottle: %s" % (
        " ".join("%s:%d%s" % (c, v[0], v[1]) for (c, _), v in got.items()), klein))


# ---------------------------------------------------------------- 4

def _family(n, columns_of):
    """Subspace of 3×n matrices spanned by the images of unit parameters."""
    basis = []
    for p in range(columns_of.nparams):
        params = [F(int(p == q)) for q in range(columns_of.nparams)]
        cols = columns_of(params)
        basis.append(tuple(F(cols[a][r]) for r in range(3) for a in range(n)))
    return basis


def fam(nparams):
    def deco(f):
        f.nparams = nparams
        return f
    return deco


def _rot(m, v):
    return tuple(sum(F(m[r][c]) * v[c] for c in range(3)) for r in range(3))


def _neg(v):
    return tuple(-x for x in v)


def reference_families():
    Rp, Rm = cr.RPLUS, cr.RMINUS
    R2 = cr.R2

    @fam(1)
    def a1_line(p):
        z = (p[0], 0, 0)
        return [z, _neg(z)]

    @fam(2)
    def a1_plane(p):
        z = (0, p[0], p[1])
        return [z, _neg(z)]

    @fam(3)
    def a2_mixed(p):
        a, b, c = p
        z2 = (-a / 2, b, c)
        return [(a, 0, 0), z2, _rot(R2, z2)]

    @fam(2)
    def a2_line(p):
        a, b = p
        return [(a, 0, 0), (b, 0, 0), (-a - b, 0, 0)]

    @fam(3)
    def d4_orbit(p):
        z = tuple(p)
        return [z, _rot(Rp, z), _rot(Rm, z), _rot(Rp, _rot(Rm, z))]

    def d4_planes(u, v):
        @fam(4)
        def f(p):
            z1 = tuple(p[0] * x + p[1] * y for x, y in zip(*_plane(u)))
            z2 = tuple(p[2] * x + p[3] * y for x, y in zip(*_plane(v)))
            return [z1, z2, _neg(z1), _neg(z2)]
        return f

    def d4_axis(a):
        @fam(4)
        def f(p):
            e = [0, 0, 0]
            cols = []
            for c in range(4):
                e = [0, 0, 0]
                e[a] = p[c]
                cols.append(tuple(e))
            return cols
        return f

    return {
        ("A1", ("R2",)): {"Ri": [a1_line], "(Ri)perp": [a1_plane]},
        ("A2", ("R2",)): {"zeta1 in Ri, R2 zeta2 = zeta3": [a2_mixed], "all in Ri": [a2_line]},
        ("D4", ("R+", "R-")): {
            "orbit of zeta": [d4_orbit],
            "pairs in coordinate planes": [d4_planes(u, v) for u in range(3) for v in range(3)],
            "all on one axis": [d4_axis(a) for a in range(3)],
        },
    }


def _plane(a):
    """Two basis vectors of (R e_a)^perp."""
    e = [tuple(F(int(i == j)) for j in range(3)) for i in range(3)]
    return [e[b] for b in range(3) if b != a]


ROT = {"R2": cr.R2, "R+": cr.RPLUS, "R-": cr.RMINUS}


def test_criterion_4_fixed_loci(acceptance):
    lines, ok = [], True
    for (gamma, rots), fams in reference_families().items():
        t0 = time.perf_counter()
        rs = ale.root_system(gamma)
        W = ale.weyl_group(rs)
        rotations = [ROT[r] for r in rots]
        comps = ale.fixed_locus(rotations, rs, W)
        matched_fams = 0
        used = set()
        for name, members in fams.items():
            hits = set()
            for f in members:
                basis = _family(rs.dim, f)
                orbit = ale.weyl_orbit_keys(basis, rs, W)
                hits |= {k for k, c in enumerate(comps) if ale.same_family(basis, c, rs, W, orbit)}
            used |= hits
            matched_fams += bool(hits)
        rep = ale.sample_outside(rotations, rs, comps, samples=10000, seed=0, W=W)
        dt = time.perf_counter() - t0
        good = (len(comps) == len(fams) and matched_fams == len(fams) and rep.outside == 0
                and rep.fixed_off_wall >= 10000 and dt < 60)
        ok &= good
        lines.append("%s/%s %s: %d families vs %d solver components, %d matched, oracle outside %d of %d, %.1f s" % (
            gamma, ",".join(rots), "ok" if good else "MISMATCH", len(fams), len(comps), matched_fams,
            rep.outside, rep.fixed_off_wall, dt))
    report(acceptance, 4, ok, "; ".join(lines))


# ---------------------------------------------------------------- 5

def test_criterion_5_weyl_orders(acceptance):
    got = {"A%d" % k: len(ale.weyl_group(ale.root_system("A%d" % k))) for k in range(1, 5)}
    got["D4"] = len(ale.weyl_group(ale.root_system("D4")))
    want = {"A1": 2, "A2": 6, "A3": 24, "A4": 120, "D4": 192}
    report(acceptance, 5, got == want, "orders %s" % got)


# ---------------------------------------------------------------- 6

def test_criterion_6_gibbons_hawking(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    ratios, slopes = [], []
    for idx in range(20):
        k = (2, 3, 4)[idx % 3]
        z = balanced_config(rng, k)
        assert sum(p[0] for p in z) == 0
        slopes.append(float(ale.gh_decay_exponent(z).slope))
        pts = np.array([[float(x) for x in p] for p in z])
        while True:
            q = rng.uniform(-3, 3, size=3)
            if np.min(np.linalg.norm(pts - q, axis=1)) > 0.75:
                break
        vals = [ale.gh_harmonicity_residual(z, tuple(q), 0.1 / 2 ** a) for a in range(4)]
        ratios += [float(r) for r in ale.richardson_ratios(vals)]
    mono = ale.gh_form_closedness([(0, 0, 0)], (0.3, 0.4, 0.5), 1e-3)
    hk = max(mono.curl_residual, mono.closedness_residual, mono.wedge_residual)
    dt = time.perf_counter() - t0
    ok = (all(3.5 <= r <= 4.5 for r in ratios) and max(slopes) <= -2.9 and hk <= 1e-6 and dt < 60)
    report(acceptance, 6, ok, "ratios in [%.3f, %.3f], worst slope %.3f, monopole residual %.2e "
           "(second-order stencil %.2e), %.1f s" % (min(ratios), max(ratios), max(slopes), hk,
                                                     mono.curl_residual_o2, dt))


# ---------------------------------------------------------------- 7

def test_criterion_7_fueter_estimate(acceptance):
    t0 = time.perf_counter()
    op = fu.two_block_model(seed=0)
    rows, spread = fu.sweep_L(op.A, Ls=(1, 2, 4, 8, 16, 32, 64), trials=200, seed=0)
    worst = max(r.c_l2 / r.oracle_l2 for r in rows)
    dt = time.perf_counter() - t0
    ok = spread <= 1.10 and worst <= 1.05 and dt < 60
    report(acceptance, 7, ok, "normalized constant spread %.4f, c_perp %.3f..%.3f, L2 ratio/oracle <= %.4f, %.1f s" % (
        spread, min(r.c_perp for r in rows), max(r.c_perp for r in rows), worst, dt))


# ---------------------------------------------------------------- 8

def test_criterion_8_contraction(acceptance):
    p = fu.ContractionProblem(beta=2.5, gamma=1.0)
    T = fu.threshold(p)
    rows = fu.t_sweep(p)
    below = [r for r in rows if r["t"] <= T]
    above = [r for r in rows if r["t"] > T]
    conv = all(r["status"] == "ok" and r["max_ratio"] < 1 and r["max_ratio"] <= r["lipschitz_bound"]
               and r["residual"] <= 1e-12 for r in below)
    gated = all(r["status"] == "above-threshold" for r in above)
    scaled = max(r["scaled"] for r in below)
    bounded = scaled <= 2 * p.c_E
    try:
        fu.contraction_solve(fu.ContractionProblem(c1=50.0, c2=5.0, c3=5.0, t=1.0), force=True)
        detected = False
    except fu.ContractionFailure:
        detected = True
    scal = []
    for a, b in ((0.3, 0.5), (1.0, 0.1), (-0.2, 0.7), (0.05, 2.0)):
        v, root, _ = fu.scalar_quadratic(a, b)
        scal.append(abs(v - root))
    ok = conv and gated and bounded and detected and max(scal) <= 1e-12 and len(below) >= 3
    report(acceptance, 8, ok, "T=%.4f, %d runs below converge: %s, above gated: %s, max |v|/t^1.5 = %.4f <= %.1f, "
           "out-of-regime detected: %s, scalar error %.1e" % (T, len(below), conv, gated, scaled, 2 * p.c_E,
                                                           detected, max(scal)))


# ---------------------------------------------------------------- 9

def _rq(r):
    return qa.Quat(*(F(r.randint(-9, 9), r.randint(1, 6)) for _ in range(4)))


def _r7(r):
    return tuple(F(r.randint(-9, 9), r.randint(1, 6)) for _ in range(7))


def test_criterion_9_algebraic_identities(acceptance):
    r = random.Random(20240601)
    bad = {"quaternion": 0, "cross": 0, "associator": 0, "lambda+": 0}
    for _ in range(1000):
        p, q, s = _rq(r), _rq(r), _rq(r)
        if (p * q) * s != p * (q * s) or (p * q).norm2() != p.norm2() * q.norm2() or (p * q).conj() != q.conj() * p.conj():
            bad["quaternion"] += 1
        u, v, w = _r7(r), _r7(r), _r7(r)
        uv = qa.cross(u, v)
        if (qa.cross(v, u) != _neg(uv) or la.dot(uv, u) != 0 or
                la.dot(uv, uv) != la.dot(u, u) * la.dot(v, v) - la.dot(u, v) ** 2):
            bad["cross"] += 1
        if qa.associator(u, v, w) != qa.associator_rhs(u, v, w):
            bad["associator"] += 1
    for _ in range(50):
        a, b, c, d = (qa.unit_from(_rq(r)) for _ in range(4))
        R, S = qa.quat_rotation(a, b), qa.quat_rotation(c, d)
        if qa.lambda_plus(R @ S).m != la.matmul(qa.lambda_plus(R).m, qa.lambda_plus(S).m):
            bad["lambda+"] += 1
    tf = {cls: cr.torsion_free_check(cr.make_bieberbach(cls))[0] for cls in cr.CLASSES}
    ok = not any(bad.values()) and all(tf.values())
    report(acceptance, 9, ok, "violations %s on 1000 triples / 50 pairs; torsion-free %s" % (bad, tf))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
