"""Hypothesis checklists and guaranteed associative counts.

Two mechanisms are supported:

* orbifold-fixed-points: every qualifying curve Σ in a component contributes
  n_f associatives, n_f being the number of singular points of the base
  orbifold M/H for the chosen axis ξ;
* K-equivariant-exact: a component fixed by a symmetry group K whose induced
  action on H_1(M) has no invariants contributes 3.

The module stores evidence for every checklist item; the conclusions are
re-derivable from crystallographic, flat_orbifold and ale_deformation.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

from . import ale_deformation as ale
from . import crystallographic as cr
from . import flat_orbifold as fo
from . import linalg as la
from .quaternion import PHI0, AltForm, Quat, lambda_plus, quat_rotation

ORBIFOLD_POINTS = "orbifold-fixed-points"
EQUIVARIANT = "K-equivariant-exact"


class LiftDataUnavailable(ValueError):
    pass


class FixtureError(ValueError):
    pass


# ---------------------------------------------------------------- data

@dataclass
class Item:
    name: str
    ok: bool
    evidence: str

    def to_json(self):
        return {"item": self.name, "ok": self.ok, "evidence": self.evidence}


@dataclass
class MappingTorusModel:
    fiber: str = "sphere"
    monodromy: str = "identity"

    @property
    def topology(self):
        if self.monodromy != "identity":
            raise ValueError("only the identity monodromy is modelled")
        return "S1 x S2" if self.fiber == "sphere" else "S1 x " + self.fiber

    def to_json(self):
        return {"fiber": self.fiber, "monodromy": self.monodromy, "topology": self.topology}


@dataclass
class Axis:
    xi: tuple               # primitive integer lattice coordinates
    direction: tuple        # ξ̂ up to scale, in the orthonormal frame of Im H
    length: Fraction = Fraction(1)


@dataclass
class ComponentData:
    """Orbifold-side data of one singular component."""
    id: str
    gamma: str                       # root system label of Γ, e.g. "A1"
    group: cr.BieberbachGroup        # G_⋆
    rho: list                        # Λ⁺ρ(g) on Im H for each generator of G_⋆ (3×3), or None
    xi_trivial: bool = True          # translation by ξ acts trivially on X
    multiplicity: int = 1
    kappa: tuple = None              # K acting on the tangent lattice (integer 3×3), per element
    kappa_plus: tuple = None         # Λ⁺ of the normal action of K, per element
    k_fixed: bool = None             # every element of K maps the component to itself
    notes: list = field(default_factory=list)


@dataclass
class ResolutionChoice:
    """Resolution side: a deformation point and the axes to use, per component."""
    component: str
    zeta: tuple                      # 3×n exact matrix
    axes: list                       # list of Axis
    curves: list = None              # explicit CurveClass list; derived when None
    t_note: str = "t in (0, T1)"

    def to_json(self):
        return {"component": self.component, "zeta": ale._mat_json(self.zeta),
                "axes": [{"xi": [int(x) for x in a.xi], "direction": [_rj(x) for x in a.direction],
                          "L": _rj(a.length)} for a in self.axes],
                "t": self.t_note}


@dataclass
class AssociativeCertificate:
    component: str
    xi: tuple
    length: Fraction
    curve: ale.CurveClass
    n_f: int
    checklist: list
    mechanism: str
    guaranteed_count: int
    homology: str
    isotropy: list = field(default_factory=list)
    multiplicity: int = 1

    def __post_init__(self):
        if self.guaranteed_count > 0 and not all(i.ok for i in self.checklist):
            raise ValueError("positive count with a failing checklist item")
        if self.mechanism == EQUIVARIANT and not any(i.name == "v.invariants-vanish" for i in self.checklist):
            raise ValueError("K-equivariant mechanism needs the invariants item")

    def to_json(self):
        return {
            "component": self.component,
            "xi": [int(x) for x in self.xi],
            "L": _rj(self.length),
            "curve": self.curve.to_json() if self.curve else None,
            "n_f": self.n_f,
            "isotropy": ["C%d" % o for o in self.isotropy],
            "mechanism": self.mechanism,
            "guaranteed_count": self.guaranteed_count,
            "multiplicity": self.multiplicity,
            "homology": self.homology,
            "model": MappingTorusModel().to_json(),
            "checklist": [i.to_json() for i in self.checklist],
        }


@dataclass
class CountResult:
    total: int
    certificates: list
    per_component: dict

    def to_json(self):
        return {"guaranteed_total": self.total, "per_component": self.per_component,
                "certificates": [c.to_json() for c in self.certificates]}


def _rj(x):
    x = la.frac(x)
    return {"num": x.numerator, "den": x.denominator}


# ---------------------------------------------------------------- helpers

def rotation_of(spec):
    """Λ⁺ image of a map of H given as {"a": quat, "b": quat} (q -> a q conj b) or a 3×3 matrix."""
    if isinstance(spec, dict):
        a = Quat(*(la.frac(x) for x in spec["a"]))
        b = Quat(*(la.frac(x) for x in spec["b"]))
        return lambda_plus(quat_rotation(a, b)).m
    m = la.mat(spec)
    if len(m) == 4:
        return lambda_plus(_rot(m)).m
    return m


def _rot(m):
    from .quaternion import Rotation
    return Rotation(m)


def homology_tag(component, curve, xi, rs):
    """Label of η_⋆([P_[0]]): component, curve class in the root lattice, axis."""
    coords = _root_coords(curve.root, rs)
    lead = next((c for c in coords if c), 1)
    if lead < 0:
        coords = tuple(-c for c in coords)
    return "%s|root=(%s)|xi=(%s)" % (component, ",".join(str(c) for c in coords),
                                     ",".join(str(int(x)) for x in xi))


def _root_coords(root, rs):
    """Coordinates of a root in the basis of simple roots."""
    sol = la.solve(la.transpose(la.mat(rs.simple)), la.vec(root))
    if sol is None or any(x.denominator != 1 for x in sol):
        raise ValueError("curve class %s is not in the root lattice" % (root,))
    return tuple(int(x) for x in sol)


def _direction_ok(G, axis):
    """ξ in lattice coordinates points along the stated direction (when the basis is rational)."""
    b = G.lattice.basis_matrix()
    if b is None:
        return True, "lattice given by its Gram matrix; direction taken as stated"
    v = la.matvec(b, la.vec(axis.xi))
    d = la.vec(axis.direction)
    par = all(v[a] * d[c] - v[c] * d[a] == 0 for a in range(3) for c in range(a + 1, 3)) and la.dot(v, d) > 0
    return par, "basis·ξ = %s, direction %s" % (_fmtv(v), _fmtv(d))


def _fmtv(v):
    return "(" + ",".join(str(x) for x in v) + ")"


def _curves(choice, axis, rs):
    if choice.curves is not None:
        return [c for c in choice.curves if _parallel(c.direction, axis.direction)]
    if not ale.off_walls(choice.zeta, rs):
        return []  # X_ζ is singular; item (i) reports it
    return ale.invariant_curve_classes(choice.zeta, axis.direction, rs)


def _parallel(u, v):
    u, v = la.vec(u), la.vec(v)
    return all(u[a] * v[c] - u[c] * v[a] == 0 for a in range(3) for c in range(a + 1, 3))


# ---------------------------------------------------------------- orbifold fixed points

def check_orbifold_points(comp, choice, axis, curve, strict_centrality=False, W=None):
    """Checklist (i)-(iii) for one curve along one axis."""
    rs = ale.root_system(comp.gamma)
    W = W if W is not None else ale.weyl_group(rs)
    items = []
    z = choice.zeta
    off = ale.off_walls(z, rs)
    found = curve is not None and off
    items.append(Item("i.curve", found and curve.genus == 0,
                      "genus-0 %s curve %s along %s; deformation point %s the walls"
                      % (curve.kind, list(curve.root), _fmtv(axis.direction), "off" if off else "on")
                      if curve else "no curve along %s" % _fmtv(axis.direction)))
    g = la.content(la.vec(axis.xi))
    items.append(Item("ii.primitive", g == 1, "gcd of lattice coordinates = %d" % g))
    dok, dev = _direction_ok(comp.group, axis)
    items.append(Item("ii.direction", dok, dev))
    normal = cr.is_eigen_axis(axis.xi, comp.group)
    central = cr.is_central(axis.xi, comp.group)
    items.append(Item("ii.normal", normal, "every rotation part maps ξ to ±ξ" if normal else "some rotation moves ξ off ±ξ"))
    items.append(Item("ii.central", central or not strict_centrality,
                      "R ξ = ξ for every generator" if central else
                      "not central (some R ξ = -ξ); %s" % ("required" if strict_centrality else "normality used")))
    if comp.group.generators and comp.rho is None:
        raise LiftDataUnavailable("lift data unavailable for component %s" % comp.id)
    rho = comp.rho or []
    fixed_ev, inv_ok = [], True
    for r in rho:
        lifts = ale.weyl_lift(r, z, rs, W)
        if not lifts:
            inv_ok = False
            fixed_ev.append("%s fixes no Weyl image of ζ" % _fmtm(r))
            continue
        ok = curve is not None and ale.curve_invariant(curve, r, z, rs, W)
        inv_ok = inv_ok and ok
        w = lifts[0]
        fixed_ev.append("%s lifts with w = perm%s sign%s; curve %s" % (_fmtm(r), list(w.perm), list(w.sign),
                                                                      "preserved" if ok else "moved"))
    items.append(Item("iii.invariant", inv_ok, "; ".join(fixed_ev) or "G_⋆ = Λ acts trivially"))
    triv = comp.xi_trivial or not comp.group.generators
    items.append(Item("iii.xi-trivial", triv, "translation by ξ acts as the identity on X (%s)"
                      % ("class 1" if not comp.group.generators else "stated by the fixture")))
    return items


def _fmtm(m):
    return "[" + ";".join(",".join(str(x) for x in r) for r in m) + "]"


def count_orbifold_points(components, choices, strict_centrality=False):
    """Sum of n_f over qualifying (component, axis, curve) triples, times multiplicity."""
    by_id = {c.id: c for c in components}
    certs = []
    per = {}
    for ch in sorted(choices, key=lambda c: c.component):
        comp = by_id.get(ch.component)
        if comp is None:
            raise FixtureError("resolution refers to unknown component %r" % ch.component)
        rs = ale.root_system(comp.gamma)
        if rs.type == "A":
            ale.check_balanced([tuple(ch.zeta[r][a] for r in range(3)) for a in range(rs.dim)])
        W = ale.weyl_group(rs)
        sub = 0
        for axis in ch.axes:
            base = _base(comp.group, axis.xi)
            curves = _curves(ch, axis, rs) or [None]
            for curve in curves:
                items = check_orbifold_points(comp, ch, axis, curve, strict_centrality, W)
                ok = all(i.ok for i in items) and base is not None
                nf = base.n_f if base is not None else 0
                count = nf if ok else 0
                certs.append(AssociativeCertificate(
                    comp.id, tuple(axis.xi), axis.length, curve, nf, items, ORBIFOLD_POINTS, count,
                    homology_tag(comp.id, curve, axis.xi, rs) if curve else "",
                    base.isotropy_orders if base else [], comp.multiplicity))
                sub += count * comp.multiplicity
        per[comp.id] = sub
    return CountResult(sum(per.values()), certs, per)


def _base(G, xi):
    try:
        return cr.base_orbifold(G, xi)
    except cr.ConstraintError:
        return None


# ---------------------------------------------------------------- K-equivariant exact forms

def check_equivariant(comp, choice, axis, curve, W=None):
    """Checklist (i)-(v) for the K-equivariant mechanism."""
    items = check_orbifold_points(comp, choice, axis, curve, strict_centrality=False, W=W)
    rs = ale.root_system(comp.gamma)
    W = W if W is not None else ale.weyl_group(rs)
    if comp.kappa is None or comp.kappa_plus is None:
        raise LiftDataUnavailable("lift data unavailable for the K action on %s" % comp.id)
    items.append(Item("iv.fixed", bool(comp.k_fixed), "K maps the component to itself" if comp.k_fixed
                      else "K moves the component"))
    xi = la.vec(axis.xi)
    norm_ok = all(la.matvec(k, xi) in (xi, la.vscale(-1, xi)) for k in comp.kappa)
    items.append(Item("iv.normalizes", norm_ok, "κ(g) ξ = ±ξ for every g ∈ K" if norm_ok else "κ moves Zξ"))
    lift_ok, ev = True, []
    for kp in comp.kappa_plus:
        ok = curve is not None and bool(ale.weyl_lift(kp, choice.zeta, rs, W)) and \
            ale.curve_invariant(curve, kp, choice.zeta, rs, W)
        lift_ok = lift_ok and ok
        ev.append("%s %s" % (_fmtm(kp), "preserves Σ" if ok else "does not preserve Σ"))
    items.append(Item("iv.curve", lift_ok, "; ".join(ev)))
    if norm_ok:
        # invariants of the whole group: intersect the fixed spaces of each element
        mats = [cr.quotient_action_matrix(comp.group, axis.xi, k) for k in comp.kappa]
        inv = _joint_invariants(mats)
        items.append(Item("v.invariants-vanish", inv == 0,
                          "H_1 action %s; dim Hom(π_1 M, R)^K = %d" % (" ".join(_fmtm(m) for m in mats), inv)))
    else:
        items.append(Item("v.invariants-vanish", False, "K does not act on M"))
    return items


def _joint_invariants(mats):
    rows = []
    for m in mats:
        rows.extend(la.matsub(la.transpose(la.mat(m)), la.identity(2)))
    if not rows:
        return 2
    return len(la.nullspace(tuple(rows)))


def count_equivariant(components, choices):
    """3 per qualifying component (M = T² is not a sphere)."""
    by_id = {c.id: c for c in components}
    certs, per = [], {}
    for ch in sorted(choices, key=lambda c: c.component):
        comp = by_id.get(ch.component)
        if comp is None:
            raise FixtureError("resolution refers to unknown component %r" % ch.component)
        rs = ale.root_system(comp.gamma)
        W = ale.weyl_group(rs)
        best = None
        for axis in ch.axes:
            for curve in _curves(ch, axis, rs) or [None]:
                items = check_equivariant(comp, ch, axis, curve, W)
                ok = all(i.ok for i in items)
                cert = AssociativeCertificate(comp.id, tuple(axis.xi), axis.length, curve, 0, items, EQUIVARIANT,
                                              3 if ok else 0,
                                              homology_tag(comp.id, curve, axis.xi, rs) if curve else "",
                                              [], comp.multiplicity)
                certs.append(cert)
                if ok and best is None:
                    best = cert
        # one family of zeros per component: 3 is a bound for the component, not per curve
        per[comp.id] = 3 * comp.multiplicity if best else 0
    return CountResult(sum(per.values()), certs, per)


# ---------------------------------------------------------------- T^7 components

def adapted_frame(dirs, form=PHI0):
    """Signed coordinate frame (t1,t2,t3,n0..n3) in which φ restricts to the standard form.

    dirs must be coordinate axes of R^7. Returns a 7×7 matrix whose columns
    are the frame vectors, or None.
    """
    tang = []
    for d in dirs:
        nz = [a for a, x in enumerate(d) if x]
        if len(nz) != 1:
            return None
        tang.append(nz[0])
    tang.sort()
    normal = [a for a in range(7) if a not in tang]
    target = form.phi.c
    for tp in permutations(tang):
        for np_ in permutations(normal):
            cols = list(tp) + list(np_)
            for signs in product((1, -1), repeat=7):
                if _relabel(form.phi, cols, signs) == target:
                    m = [[Fraction(0)] * 7 for _ in range(7)]
                    for c, (a, s) in enumerate(zip(cols, signs)):
                        m[a][c] = Fraction(s)
                    return tuple(tuple(r) for r in m)
    return None


def _relabel(phi, cols, signs):
    """Coefficients of P^*φ for the signed permutation P e_c = s_c e_{cols[c]}."""
    inv = {a: c for c, a in enumerate(cols)}
    out = {}
    for idx, v in phi.c.items():
        pre = tuple(inv[a] for a in idx)
        s = 1
        for a in idx:
            s *= signs[inv[a]]
        out[pre] = v * s
    return AltForm(7, 3, out).c


def t7_components(G, lam, singular_set, gamma="A1"):
    """ComponentData for the components of T^7/G, with the K = <λ> action attached."""
    action = fo.symmetry_action_on_components(G, lam, singular_set)
    out = []
    for c in singular_set.components:
        frame = adapted_frame(c.torus.dirs)
        notes = []
        group = cr.make_bieberbach("1")
        lift = fo.stabilizing_element(lam, c, singular_set)
        kappa = kappa_plus = None
        fixed = action.permutation[c.id] == c.id
        if frame is None:
            notes.append("no signed coordinate frame adapts φ to this component")
        elif lift is not None:
            (rot, _), word = lift
            m = la.matmul(la.matmul(la.transpose(frame), rot), frame)
            tang = tuple(tuple(r[:3]) for r in m[:3])
            norm = tuple(tuple(r[3:]) for r in m[3:])
            kappa = (tang,)
            try:
                kappa_plus = (lambda_plus(_rot(norm)).m,)
            except ValueError as e:
                notes.append("normal action: %s" % e)
            if word != "e":
                notes.append("λ acts through λ∘%s" % word)
        out.append(ComponentData(c.id, gamma, group, [], True, 1, kappa, kappa_plus, fixed, notes))
    return out, action


# ---------------------------------------------------------------- fixtures

def component_from_json(d):
    G = cr.BieberbachGroup.from_json(d["group"]) if "group" in d else cr.make_bieberbach("1")
    rho = [rotation_of(r) for r in d["rho"]] if "rho" in d else None
    if rho is not None and len(rho) != len(G.generators):
        raise FixtureError("component %s: %d rho entries for %d generators" % (d["id"], len(rho), len(G.generators)))
    return ComponentData(d["id"], d["gamma"], G, rho, d.get("xi_trivial", True), int(d.get("multiplicity", 1)))


def choice_from_json(d, component_id=None):
    z = la.mat(d["zeta"])
    if len(z) != 3:
        raise FixtureError("zeta must have three rows (i, j, k)")
    axes = []
    for a in d.get("axes", []):
        axes.append(Axis(tuple(int(x) for x in a["xi"]), la.vec(a.get("direction", a["xi"])),
                         la.frac(a.get("L", 1))))
    return ResolutionChoice(component_id or d["component"], z, axes)


def t7_setup(orb):
    G = fo.CrystalGroupR7.from_json({"generators": orb["generators"]})
    ss = fo.singular_components(G, orb.get("strata"))
    lam = fo.Isometry7.from_json(orb["symmetry"]) if "symmetry" in orb else None
    return G, ss, lam


def from_fixture(orb, res):
    """(components, choices) from the orbifold and resolution sections of a fixture."""
    kind = orb.get("kind", "local")
    if kind == "local":
        comps = [component_from_json(c) for c in orb["components"]]
    elif kind == "t7":
        G, ss, lam = t7_setup(orb)
        if lam is None:
            raise FixtureError("t7 orbifold needs a symmetry for the K-equivariant count")
        comps, _ = t7_components(G, lam, ss, orb.get("gamma", "A1"))
    else:
        raise FixtureError("unknown orbifold kind %r" % kind)
    ids = {c.id for c in comps}
    choices = []
    for d in res.get("components", []):
        if d["component"] not in ids:
            raise FixtureError("resolution refers to unknown component %r" % d["component"])
        choices.append(choice_from_json(d))
    strata = res.get("strata", {})
    for c in comps:
        stratum = c.id.split("#")[0]
        if stratum in strata and not any(ch.component == c.id for ch in choices):
            choices.append(choice_from_json(strata[stratum], c.id))
    return comps, choices
