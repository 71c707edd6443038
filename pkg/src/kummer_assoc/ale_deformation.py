"""Gibbons-Hawking data and the combinatorial side of ALE deformation spaces.

Charges and deformation points are exact (Fractions). The potential, the
monopole connection and the closedness/decay checks are float numerics.

A deformation point is a 3×n matrix ζ whose rows are the i, j, k
components and whose columns are indexed by the root-space coordinates:
the n = k+1 charges for A_k (balanced: every row sums to 0) and the four
coordinates e_1..e_4 for D_4. A Weyl element w acts by ζ -> ζ w^T and a
rotation R of Im H by ζ -> R ζ.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import isqrt

import numpy as np

from . import linalg as la


class ChargeError(ValueError):
    pass


class UnsupportedADE(ValueError):
    pass


# ---------------------------------------------------------------- charges

def _charges(zeta):
    return [la.vec(z) for z in zeta]


def _exact_sqrt(x):
    x = Fraction(x)
    if x < 0:
        return None
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def check_balanced(zeta):
    tot = [sum(c[r] for c in _charges(zeta)) for r in range(3)]
    if any(tot):
        raise ChargeError("charges do not sum to zero: %s" % (tot,))


def gh_potential(zeta, q):
    """V(q) = Σ 1/(2|q - ζ_a|); exact when every distance is rational."""
    q = la.vec(q) if not isinstance(q[0], float) else tuple(q)
    if all(isinstance(x, Fraction) for x in q):
        total = Fraction(0)
        for c in _charges(zeta):
            d2 = sum((x - y) ** 2 for x, y in zip(q, c))
            if d2 == 0:
                raise ChargeError("potential evaluated at a charge")
            r = _exact_sqrt(d2)
            if r is None:
                break
            total += 1 / (2 * r)
        else:
            return total
    return float(_potential_np(_charge_array(zeta), np.asarray([float(x) for x in q])))


def _charge_array(zeta):
    return np.array([[float(x) for x in c] for c in _charges(zeta)], dtype=float).reshape(-1, 3)


def _potential_np(ca, q):
    d = np.linalg.norm(q[None, :] - ca, axis=1)
    if np.any(d == 0):
        raise ChargeError("potential evaluated at a charge")
    return np.sum(0.5 / d)


def _monopole_A(ca, q, axis):
    """Sum of Dirac monopole potentials, each with its string along -axis."""
    p = q[None, :] - ca
    r = np.linalg.norm(p, axis=1)
    z = p @ axis
    den = r * (r + z)
    if np.any(den <= 1e-300):
        raise ChargeError("point lies on a Dirac string")
    return 0.5 * np.sum(np.cross(axis[None, :], p) / den[:, None], axis=0)


_E = np.eye(3)


def _min_charge_distance(ca, q):
    return float(np.min(np.linalg.norm(ca - q[None, :], axis=1)))


def _string_distance(ca, q, axis):
    """Distance from q to the union of strings {ζ_a - s axis : s ≥ 0}."""
    best = np.inf
    for c in ca:
        p = q - c
        s = -(p @ axis)
        d = np.linalg.norm(p) if s <= 0 else np.linalg.norm(p + s * axis)
        best = min(best, d)
    return best


def gh_harmonicity_residual(zeta, q, h):
    """7-point Laplacian of V at q with step h."""
    ca = _charge_array(zeta)
    q = np.asarray([float(x) for x in q])
    if _min_charge_distance(ca, q) <= 1.5 * h:
        raise ChargeError("stencil touches a charge")
    lap = -6 * _potential_np(ca, q)
    for e in _E:
        lap += _potential_np(ca, q + h * e) + _potential_np(ca, q - h * e)
    return lap / h ** 2


def richardson_ratios(values):
    return [values[n] / values[n + 1] for n in range(len(values) - 1)]


def _deriv(f, q, e, h, order=2):
    """Central difference along e; order 4 is the Richardson-combined stencil."""
    d1 = (f(q + h * e) - f(q - h * e)) / (2 * h)
    if order == 2:
        return d1
    d2 = (f(q + 2 * h * e) - f(q - 2 * h * e)) / (4 * h)
    return (4 * d1 - d2) / 3


def _curl(f, q, h, order=2):
    def d(i, j):  # ∂_j f_i
        return _deriv(f, q, _E[j], h, order)[i]
    return np.array([d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)])


def _grad(f, q, h, order=2):
    return np.array([_deriv(f, q, e, h, order) for e in _E])


def _hk_forms(ca, q, axis):
    """Coefficients of ω_r = η∧dq_r + V *dq_r in the basis (η∧dq_s, dq_s∧dq_t)."""
    v = _potential_np(ca, q)
    # ω_r = η∧dq_r + V * (dq_{r+1}∧dq_{r+2}); stored as (a_s, b_s) with
    # ω = Σ a_s η∧dq_s + Σ b_s *dq_s
    return [(np.eye(3)[r], v * np.eye(3)[r]) for r in range(3)], v


def _wedge_coeff(w1, w2):
    """ω∧ω' as a multiple of η∧dq1∧dq2∧dq3."""
    (a1, b1), (a2, b2) = w1, w2
    return float(a1 @ b2 + a2 @ b1)


@dataclass
class ClosednessReport:
    h: float
    curl_residual: float        # max |curl A + grad V|, fourth-order stencil
    closedness_residual: float  # max over r of |dω_r| coefficients
    wedge_residual: float       # max |ω_r∧ω_s - 2 δ_rs V vol|
    curl_residual_o2: float = 0.0  # same with the plain second-order stencil

    def to_json(self):
        return {"h": self.h, "curl_residual": self.curl_residual, "curl_residual_o2": self.curl_residual_o2,
                "closedness_residual": self.closedness_residual, "wedge_residual": self.wedge_residual}


def gh_form_closedness(zeta, q, h, axis=(0.0, 0.0, 1.0)):
    """Residuals of dθ = -*dV and of the hyperkähler relations at q.

    In the chart (t, q) over a string-free ball, η = dt + A(q) with A the
    monopole potential, and ω_r = η∧dq_r + V *dq_r. Then
    dω_r = (curl A + grad V)_r vol_3, and ω_r∧ω_s = 2 δ_rs V η∧vol_3.
    """
    ca = _charge_array(zeta)
    q = np.asarray([float(x) for x in q])
    ax = np.asarray(axis, dtype=float)
    ax = ax / np.linalg.norm(ax)
    if _min_charge_distance(ca, q) <= 3 * h or _string_distance(ca, q, ax) <= 3 * h:
        raise ChargeError("stencil meets a charge or a Dirac string")
    A = lambda x: _monopole_A(ca, x, ax)
    V = lambda x: _potential_np(ca, x)
    res = _curl(A, q, h, 4) + _grad(V, q, h, 4)
    curl_res = float(np.max(np.abs(res)))
    o2 = float(np.max(np.abs(_curl(A, q, h) + _grad(V, q, h))))
    # dω_r = dA∧dq_r + dV∧*dq_r; the coefficient of vol_3 is (curl A)_r + ∂_r V
    closed = curl_res
    forms, v = _hk_forms(ca, q, ax)
    wedge = 0.0
    for r in range(3):
        for s in range(3):
            target = 2 * v if r == s else 0.0
            wedge = max(wedge, abs(_wedge_coeff(forms[r], forms[s]) - target))
    return ClosednessReport(h, curl_res, closed, wedge, o2)


def _sphere_directions(n=64):
    k = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * k / n)
    th = np.pi * (1 + 5 ** 0.5) * k
    return np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=1)


@dataclass
class DecayFit:
    slope: float
    radii: list
    values: list
    zero: bool = False
    quadrupole_ratio: float = None  # r^3 |V_ζ - V_0| / quadrupole oracle at the largest radius

    def to_json(self):
        return {"slope": self.slope, "exact_zero": self.zero, "quadrupole_ratio": self.quadrupole_ratio,
                "ladder": [[r, v] for r, v in zip(self.radii, self.values)]}


def default_ladder(zeta, steps=7):
    ca = _charge_array(zeta)
    scale = float(np.max(np.linalg.norm(ca, axis=1)))
    return [10 * scale * 2 ** n for n in range(steps)]


def quadrupole_oracle(zeta, dirs):
    """Leading coefficient c(q̂) with V_ζ - V_0 = c(q̂)/r^3 + O(r^-4), from the multipole expansion."""
    ca = _charge_array(zeta)
    # 1/|q-ζ| = 1/r + ζ·q̂/r^2 + (3(ζ·q̂)^2 - |ζ|^2)/(2 r^3) + ...
    dots = dirs @ ca.T
    return 0.5 * np.sum((3 * dots ** 2 - np.sum(ca ** 2, axis=1)[None, :]) / 2, axis=1)


def gh_decay_exponent(zeta, radii=None):
    """Least-squares slope of log RMS|V_ζ - V_0| against log r."""
    check_balanced(zeta)
    ca = _charge_array(zeta)
    if not np.any(ca):
        return DecayFit(float("-inf"), [], [], zero=True)
    radii = list(radii) if radii is not None else default_ladder(zeta)
    if len(radii) < 2 or any(b <= a * (1 + 1e-9) for a, b in zip(radii, radii[1:])):
        raise ValueError("radius ladder must be strictly increasing")
    dirs = _sphere_directions()
    k = len(ca)
    vals = []
    for r in radii:
        diffs = []
        for u in dirs:
            q = r * u
            # V_ζ - V_0 summed termwise to limit cancellation
            d = np.linalg.norm(q[None, :] - ca, axis=1)
            diffs.append(np.sum(0.5 / d - 0.5 / r))
        vals.append(float(np.sqrt(np.mean(np.square(diffs)))))
    slope = float(np.polyfit(np.log(radii), np.log(vals), 1)[0])
    quad = quadrupole_oracle(zeta, dirs)
    qr = float(np.sqrt(np.mean(quad ** 2)))
    ratio = vals[-1] * radii[-1] ** 3 / qr if qr > 0 else None
    return DecayFit(slope, radii, vals, quadrupole_ratio=ratio)


# ---------------------------------------------------------------- curves

@dataclass(frozen=True)
class CurveClass:
    kind: str            # "segment" or "root"
    ends: tuple          # charge indices (a, b) for segments; () for roots
    root: tuple          # root-space vector (integers)
    direction: tuple     # unit direction ξ̂ as given
    genus: int = 0

    def to_json(self):
        return {"kind": self.kind, "ends": list(self.ends), "root": [int(x) for x in self.root],
                "direction": [str(x) for x in self.direction], "genus": self.genus}


def _parallel(u, v):
    return all(u[a] * v[b] - u[b] * v[a] == 0 for a in range(3) for b in range(a + 1, 3))


def segments(zeta, xi_hat):
    """Minimal segments along ξ̂ joining charges with no charge in the interior."""
    xi = la.vec(xi_hat)
    if not any(xi):
        raise ValueError("direction must be nonzero")
    cs = _charges(zeta)
    n = len(cs)
    lines = []
    for a in range(n):
        for line in lines:
            if _parallel(la.vsub(cs[a], cs[line[0]]), xi):
                line.append(a)
                break
        else:
            lines.append([a])
    out = []
    for line in lines:
        pts = sorted(line, key=lambda a: (la.dot(cs[a], xi), a))
        for a, b in zip(pts, pts[1:]):
            if cs[a] == cs[b]:
                continue  # coincident charges: on a wall, no sphere
            root = tuple(1 if c == a else -1 if c == b else 0 for c in range(n))
            out.append(CurveClass("segment", (a, b), root, tuple(xi)))
    return out


# ---------------------------------------------------------------- root systems

@dataclass(frozen=True)
class SignedPerm:
    """w(x)_a = sign_a * x_{perm_a}."""
    perm: tuple
    sign: tuple

    def compose(self, o):
        # (self ∘ o)(x)_a = s_a (o x)_{p_a} = s_a o.s_{p_a} x_{o.p[p_a]}
        return SignedPerm(tuple(o.perm[p] for p in self.perm),
                          tuple(s * o.sign[p] for s, p in zip(self.sign, self.perm)))

    def matrix(self):
        n = len(self.perm)
        return tuple(tuple(Fraction(self.sign[a]) if b == self.perm[a] else Fraction(0) for b in range(n))
                     for a in range(n))

    def apply(self, x):
        return tuple(s * x[p] for s, p in zip(self.sign, self.perm))

    def inverse(self):
        n = len(self.perm)
        perm, sign = [0] * n, [0] * n
        for a, (p, s) in enumerate(zip(self.perm, self.sign)):
            perm[p], sign[p] = a, s
        return SignedPerm(tuple(perm), tuple(sign))


@dataclass
class RootSystemData:
    type: str       # "A" or "D"
    rank: int
    dim: int        # ambient dimension of the coordinates used
    simple: list
    positive: list
    generators: list  # simple reflections as SignedPerm

    @property
    def roots(self):
        return self.positive + [tuple(-x for x in r) for r in self.positive]

    @property
    def label(self):
        return "%s%d" % (self.type, self.rank)


def root_system(label):
    """'A1'..'A8' or 'D4'; E-types are rejected."""
    t, k = label[0].upper(), int(label[1:])
    if t == "A":
        if not 1 <= k <= 8:
            raise UnsupportedADE("A_k supported for 1 ≤ k ≤ 8, got %s" % label)
        n = k + 1
        e = lambda a: tuple(int(c == a) for c in range(n))
        simple = [tuple(x - y for x, y in zip(e(a), e(a + 1))) for a in range(k)]
        pos = [tuple(x - y for x, y in zip(e(a), e(b))) for a in range(n) for b in range(a + 1, n)]
        gens = []
        for a in range(k):
            p = list(range(n))
            p[a], p[a + 1] = p[a + 1], p[a]
            gens.append(SignedPerm(tuple(p), (1,) * n))
        return RootSystemData("A", k, n, simple, pos, gens)
    if t == "D" and k == 4:
        e = lambda a: tuple(int(c == a) for c in range(4))
        add = lambda u, v, s: tuple(x + s * y for x, y in zip(u, v))
        simple = [add(e(0), e(1), -1), add(e(1), e(2), -1), add(e(2), e(3), -1), add(e(2), e(3), 1)]
        pos = [add(e(a), e(b), s) for a in range(4) for b in range(a + 1, 4) for s in (-1, 1)]
        gens = [_reflection(a) for a in simple]
        return RootSystemData("D", 4, 4, simple, pos, gens)
    raise UnsupportedADE("unsupported ADE type %s (A_k with k ≤ 8 and D4 only)" % label)


def _reflection(alpha):
    """s_α as a signed permutation (valid for roots ±e_a ± e_b)."""
    n = len(alpha)
    idx = [a for a in range(n) if alpha[a]]
    a, b = idx
    perm, sign = list(range(n)), [1] * n
    perm[a], perm[b] = b, a
    s = -alpha[a] * alpha[b]  # e_a - e_b swaps; e_a + e_b swaps with both signs flipped
    sign[a] = sign[b] = s
    return SignedPerm(tuple(perm), tuple(sign))


def weyl_group(rs, bound=400000):
    """All elements by closure of the simple reflections."""
    n = rs.dim
    ident = SignedPerm(tuple(range(n)), (1,) * n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for g in rs.generators:
                c = g.compose(w)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
        if len(seen) > bound:
            raise RuntimeError("Weyl closure exceeded bound")
    return sorted(seen, key=lambda w: (w.perm, w.sign))


# ---------------------------------------------------------------- fixed loci

@dataclass
class FixedLocusComponent:
    weyl: tuple                 # one SignedPerm per rotation
    basis: tuple                # basis of the subspace, each a 3×n matrix flattened row-major
    walls: list                 # roots whose wall contains the whole subspace
    witness: tuple = None       # 3×n matrix off all walls, or None
    dim: int = 0
    orbit_size: int = 1

    @property
    def wall_bound(self):
        return self.witness is None

    def to_json(self):
        n = len(self.basis[0]) // 3 if self.basis else 0
        return {
            "weyl": [{"perm": list(w.perm), "sign": list(w.sign)} for w in self.weyl],
            "dim": self.dim,
            "basis": [_mat_json(_unflatten(b, n)) for b in self.basis],
            "walls_containing": [list(a) for a in self.walls],
            "witness": None if self.witness is None else _mat_json(self.witness),
            "wall_bound": self.wall_bound,
        }


def _mat_json(m):
    return [[{"num": x.numerator, "den": x.denominator} for x in r] for r in m]


def _unflatten(v, n):
    return tuple(tuple(v[r * n:(r + 1) * n]) for r in range(3))


def flatten(z):
    return tuple(la.frac(x) for r in z for x in r)


def act(rot, w, z):
    """(R ⊗ w) ζ = R ζ w^T for a 3×n matrix ζ."""
    cols = [tuple(z[r][c] for r in range(3)) for c in range(len(z[0]))]
    new_cols = [la.vscale(w.sign[a], la.matvec(rot, cols[w.perm[a]])) for a in range(len(cols))]
    return tuple(tuple(col[r] for col in new_cols) for r in range(3))


def wall_value(z, alpha):
    """ζ(α) ∈ Im H."""
    return tuple(sum((x * a for x, a in zip(row, alpha)), Fraction(0)) for row in z)


def off_walls(z, rs):
    return all(any(wall_value(z, a)) for a in rs.positive)


def _row_constraints(rs):
    """Linear constraints on each row of ζ (balance for A_k)."""
    if rs.type == "A":
        return [tuple(Fraction(1) for _ in range(rs.dim))]
    return []


def _eigenspace(w, s, rs, cache):
    key = (w, s)
    if key not in cache:
        n = rs.dim
        shift = tuple(tuple(Fraction(s) if a == b else Fraction(0) for b in range(n)) for a in range(n))
        m = la.matsub(w.matrix(), shift)
        rows = tuple(m) + tuple(_row_constraints(rs))
        cache[key] = la.nullspace(rows)
    return cache[key]


def _is_diagonal(rot):
    return all(rot[a][b] == 0 for a in range(3) for b in range(3) if a != b)


def _subspace_for(rots, ws, rs, cache):
    """Basis (flattened 3×n) of {ζ : (R_i ⊗ w_i) ζ = ζ ∀ i} within the balanced space."""
    n = rs.dim
    if all(_is_diagonal(r) for r in rots):
        out = []
        for row in range(3):
            space = None
            for r, w in zip(rots, ws):
                e = _eigenspace(w, int(r[row][row]), rs, cache)
                space = e if space is None else la.intersect(space, e, n)
                if not space:
                    break
            for v in space or ():
                flat = [Fraction(0)] * (3 * n)
                flat[row * n:(row + 1) * n] = v
                out.append(tuple(flat))
        return la.span_key(out, 3 * n)
    rows = []
    ident = la.identity(3 * n)
    for r, w in zip(rots, ws):
        rows.extend(la.matsub(la.kron(la.mat(r), w.matrix()), ident))
    for c in _row_constraints(rs):
        for row in range(3):
            v = [Fraction(0)] * (3 * n)
            v[row * n:(row + 1) * n] = c
            rows.append(tuple(v))
    return la.span_key(la.nullspace(tuple(rows)), 3 * n)


def _find_witness(basis, rs, max_height=6):
    n = rs.dim
    if not basis:
        return None
    mats = [_unflatten(b, n) for b in basis]
    for hgt in range(1, max_height + 1):
        for coeffs in product(range(-hgt, hgt + 1), repeat=len(mats)):
            if max(abs(c) for c in coeffs) != hgt:
                continue
            z = tuple(tuple(sum((c * m[r][a] for c, m in zip(coeffs, mats)), Fraction(0)) for a in range(n))
                      for r in range(3))
            if off_walls(z, rs):
                return z
    return None


def _walls_containing(basis, rs):
    n = rs.dim
    mats = [_unflatten(b, n) for b in basis]
    return [a for a in rs.positive if all(not any(wall_value(m, a)) for m in mats)]


def _weyl_image(basis, u, n):
    ident = la.identity(3)
    return la.span_key([flatten(act(ident, u, _unflatten(b, n))) for b in basis], 3 * n)


def _conjugacy_reps(W):
    reps, seen = [], set()
    for w in W:
        if w in seen:
            continue
        reps.append(w)
        for u in W:
            seen.add(u.compose(w).compose(u.inverse()))
    return reps


def fixed_locus(rotations, rs, W=None):
    """Maximal linear families of {[ζ] ∈ Δ : each R fixes [ζ]}, up to the Weyl action.

    Every tuple (w_1..w_m) ∈ W^m is tried, with w_1 restricted to conjugacy-class
    representatives (conjugating the whole tuple by u moves the kernel by u).
    """
    rots = [la.mat(r.m if hasattr(r, "m") else r) for r in rotations]
    W = W if W is not None else weyl_group(rs)
    n = rs.dim
    cache = {}
    spaces = {}
    first = _conjugacy_reps(W) if rots else []
    for w0 in first:
        for rest in product(W, repeat=len(rots) - 1):
            ws = (w0,) + rest
            sp = _subspace_for(rots, ws, rs, cache)
            if sp and sp not in spaces:
                spaces[sp] = ws
    # orbit canonicalization and maximality
    comps = []
    orbit_of = {}
    for sp, ws in sorted(spaces.items(), key=lambda kv: -len(kv[0])):
        if sp in orbit_of:
            continue
        orbit = {_weyl_image(sp, u, n) for u in W}
        for o in orbit:
            orbit_of[o] = sp
        comps.append((sp, ws, orbit))
    kept = []
    for sp, ws, orbit in comps:
        contained = any(len(big) > len(sp) and any(la.subspace_contains(o, sp) for o in borbit)
                        for big, _, borbit in comps)
        if not contained:
            kept.append((sp, ws, orbit))
    out = []
    for sp, ws, orbit in kept:
        walls = _walls_containing(sp, rs)
        witness = None if walls else _find_witness(sp, rs)
        out.append(FixedLocusComponent(ws, sp, walls, witness, len(sp), len(orbit)))
    out.sort(key=lambda c: (c.wall_bound, -c.dim, c.basis))
    return out


def weyl_lift(rot, z, rs, W=None):
    """All w ∈ W with (R ⊗ w) ζ = ζ."""
    W = W if W is not None else weyl_group(rs)
    rot = la.mat(rot.m if hasattr(rot, "m") else rot)
    return [w for w in W if act(rot, w, z) == z]


def is_fixed(rotations, z, rs, W=None):
    return all(weyl_lift(r, z, rs, W) for r in rotations)


def in_family(z, comp, rs, W):
    """ζ lies in the Weyl orbit of the component's subspace."""
    n = rs.dim
    flat = flatten(z)
    ident = la.identity(3)
    for u in W:
        moved = flatten(act(ident, u, z))
        if la.subspace_contains(comp.basis, [moved]):
            return True
    return False


def invariant_curve_classes(comp_or_point, xi_hat, rs):
    """Curves of X_ζ that are I_ξ̂-holomorphic at the witness (or given point)."""
    z = comp_or_point.witness if isinstance(comp_or_point, FixedLocusComponent) else comp_or_point
    if z is None or not off_walls(z, rs):
        raise ChargeError("deformation point lies on a wall")
    xi = la.vec(xi_hat)
    if rs.type == "A":
        charges = [tuple(z[r][a] for r in range(3)) for a in range(rs.dim)]
        return segments(charges, xi)
    out = []
    for alpha in rs.simple:
        v = wall_value(z, alpha)
        if any(v) and _parallel(v, xi):
            out.append(CurveClass("root", (), alpha, tuple(xi)))
    return out


def curve_invariant(curve, rot, z, rs, W=None):
    """The lift of R (through its Weyl partner) maps the curve to itself."""
    lifts = weyl_lift(rot, z, rs, W)
    if not lifts:
        return False
    w = lifts[0]
    if curve.kind == "segment":
        rot = la.mat(rot.m if hasattr(rot, "m") else rot)
        cs = [tuple(z[r][a] for r in range(3)) for a in range(rs.dim)]
        ends = {cs[a] for a in curve.ends}
        return {la.matvec(rot, p) for p in ends} == ends
    image = w.inverse().apply(curve.root)
    return image == tuple(curve.root) or image == tuple(-x for x in curve.root)


# ---------------------------------------------------------------- comparisons and sampling

def weyl_orbit_keys(basis, rs, W=None):
    """Canonical keys of all Weyl images of a subspace."""
    W = W if W is not None else weyl_group(rs)
    key = la.span_key(list(basis), 3 * rs.dim)
    return frozenset(_weyl_image(key, u, rs.dim) for u in W)


def same_family(basis, comp, rs, W=None, orbit=None):
    """A reference subspace equals the component's subspace up to the Weyl action."""
    target = la.span_key(list(comp.basis), 3 * rs.dim)
    if len(la.span_key(list(basis), 3 * rs.dim)) != len(target):
        return False
    orbit = orbit if orbit is not None else weyl_orbit_keys(basis, rs, W)
    return target in orbit


@dataclass
class SamplingReport:
    samples: int
    fixed_off_wall: int
    outside: int
    worst_distance: float
    seed: int

    def to_json(self):
        return {"samples": self.samples, "fixed_off_wall": self.fixed_off_wall,
                "outside": self.outside, "worst_distance": self.worst_distance, "seed": self.seed}


def _orth(a, tol=1e-9):
    """Orthonormal basis of the row space of a (float)."""
    if a.shape[0] == 0:
        return a
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return vt[s > tol]


def sample_outside(rotations, rs, components, samples=10000, seed=0, W=None, tol=1e-8):
    """Random fixed points off the walls that lie in no Weyl image of a component.

    Weyl tuples (w_1..w_m) are enumerated (or drawn at random when there are
    too many); each kernel of (R_i ⊗ w_i - 1) is computed numerically and kept
    if its generic point is off the walls. Samples are random points of the
    kept kernels, tested against the projectors of every Weyl image of every
    component. Runs in floats and does not reuse the exact solver.
    """
    W = W if W is not None else weyl_group(rs)
    n = rs.dim
    rng = np.random.default_rng(seed)
    rots = [np.array(la.mat(r.m if hasattr(r, "m") else r), dtype=float) for r in rotations]
    wm = np.array([np.array(w.matrix(), dtype=float) for w in W])
    eye = np.eye(3 * n)
    balance = np.kron(np.eye(3), np.ones((1, n))) if rs.type == "A" else np.zeros((0, 3 * n))
    pos = np.array(rs.positive, dtype=float)

    def off(z):
        return np.min(np.linalg.norm(z.reshape(3, n) @ pos.T, axis=0)) > 1e-6

    if len(W) ** len(rots) <= 50000:
        tuples = list(product(range(len(W)), repeat=len(rots)))
    else:
        tuples = [tuple(int(rng.integers(len(W))) for _ in rots) for _ in range(50000)]
    blocks = [np.array([np.kron(r, w) - eye for w in wm]) for r in rots]
    idx = np.array(tuples)
    stacked = np.concatenate([blocks[c][idx[:, c]] for c in range(len(rots))]
                             + [np.broadcast_to(balance, (len(idx),) + balance.shape)], axis=1)
    _, sv, vts = np.linalg.svd(stacked)
    kernels = []
    for s, vt in zip(sv, vts):
        ker = vt[np.sum(s > 1e-9):]
        if ker.shape[0] and off(rng.standard_normal(ker.shape[0]) @ ker):
            kernels.append(ker)
    projs = {}
    for c in components:
        b = np.array([[float(x) for x in v] for v in c.basis])
        for w in wm:
            q = _orth(b @ np.kron(np.eye(3), w).T)
            pr = q.T @ q
            projs.setdefault(np.round(pr, 9).tobytes(), pr)
    projs = np.array(list(projs.values()))
    fixed = outside = 0
    worst = 0.0
    for _ in range(samples if kernels else 0):
        ker = kernels[int(rng.integers(len(kernels)))]
        z = rng.standard_normal(ker.shape[0]) @ ker
        if not off(z):
            continue
        fixed += 1
        if len(projs) == 0:
            outside += 1
            continue
        d = np.min(np.linalg.norm(z - projs @ z, axis=1)) / np.linalg.norm(z)
        worst = max(worst, float(d))
        if d > tol:
            outside += 1
    return SamplingReport(samples, fixed, outside, worst, seed)
