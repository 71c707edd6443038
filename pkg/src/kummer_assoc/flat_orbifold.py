"""Flat G2-orbifolds T^7/G: phi-preservation, singular sets, local models.

Points of T^7 = R^7/Z^7 and translation parts are kept as exact rationals
reduced to [0,1). A fixed subtorus is described by an offset and an integer
basis of its direction lattice.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import linalg as la
from .crystallographic import close_group, _point_group_type
from .quaternion import PHI0

N = 7
# generic-point parameters: denominators coprime to anything a small group produces
_GENERIC = (Fraction(1, 101), Fraction(1, 103), Fraction(1, 107), Fraction(1, 109),
            Fraction(1, 113), Fraction(1, 127), Fraction(1, 131))


class NotNormalizing(ValueError):
    pass


@dataclass(frozen=True)
class Isometry7:
    rot: tuple
    trans: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rot", la.mat(self.rot))
        object.__setattr__(self, "trans", la.vec(self.trans))
        m = self.rot
        if la.matmul(la.transpose(m), m) != la.identity(len(m)):
            raise ValueError("linear part of %s is not orthogonal" % (self.name or "isometry"))

    @classmethod
    def from_json(cls, d):
        return cls(d["rot"], d["trans"], d.get("name", ""))

    def to_json(self):
        return {"name": self.name, "rot": [[int(x) for x in r] for r in self.rot],
                "trans": [{"num": x.numerator, "den": x.denominator} for x in self.trans]}


def apply(g, x):
    rot, t = (g.rot, g.trans) if hasattr(g, "rot") else g
    return la.mod1(la.vadd(la.matvec(rot, x), t))


def compose(a, b):
    """a ∘ b on (rot, trans) pairs, translation reduced mod 1."""
    return (la.matmul(a[0], b[0]), la.mod1(la.vadd(la.matvec(a[0], b[1]), a[1])))


def preserves_phi(g, form=PHI0):
    """Exact check that the linear part pulls phi back to itself."""
    rot = g.rot if hasattr(g, "rot") else la.mat(g)
    return form.phi.pullback(rot) == form.phi


@dataclass
class CrystalGroupR7:
    generators: list

    def __post_init__(self):
        self.generators = [g if isinstance(g, Isometry7) else Isometry7(*g) for g in self.generators]

    @classmethod
    def from_json(cls, d):
        return cls([Isometry7.from_json(g) for g in d["generators"]])


def quotient_group_elements(G, bound=256):
    """Affine classes mod Z^7, each tagged with a shortest generator word."""
    names = [g.name or "g%d" % i for i, g in enumerate(G.generators)]
    ident = (la.identity(N), tuple(Fraction(0) for _ in range(N)))
    words = {ident: "e"}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for nm, g in zip(names, G.generators):
                c = compose((g.rot, la.mod1(g.trans)), a)
                if c not in words:
                    if len(words) >= bound:
                        raise RuntimeError("group closure exceeded %d elements" % bound)
                    w = words[a]
                    words[c] = nm if w == "e" else nm + "*" + w
                    nxt.append(c)
        frontier = nxt
    return [(el, w) for el, w in words.items()]


# ---------------------------------------------------------------- tori

@lru_cache(maxsize=None)
def _annihilator(dirs):
    if not dirs:
        return la.identity(N)
    return la.integer_kernel(tuple(dirs))


def torus_key(offset, dirs):
    """Canonical description of offset + span(dirs) mod Z^7."""
    dkey = la.span_key(dirs, N)
    p = _annihilator(dirs)
    return (dkey, la.mod1(la.matvec(p, offset)))


def canonical_offset(offset, dirs):
    """Lexicographically smallest-looking representative: offset reduced along a complement."""
    # project out the direction span by solving for the coordinates of the pivot columns
    if not dirs:
        return la.mod1(offset)
    rows, piv = la.rref(tuple(dirs))
    x = list(la.mod1(offset))
    for row, p in zip(rows, piv):
        c = x[p]
        x = [xi - c * ri for xi, ri in zip(x, row)]
    return la.mod1(tuple(x))


@dataclass
class FixedTorus:
    offset: tuple
    dirs: tuple
    key: tuple = None

    def __post_init__(self):
        self.offset = canonical_offset(self.offset, self.dirs)
        self.key = torus_key(self.offset, self.dirs)

    @property
    def dim(self):
        return len(self.dirs)

    def generic_point(self):
        x = self.offset
        for c, d in zip(_GENERIC, self.dirs):
            x = la.vadd(x, la.vscale(c, d))
        return la.mod1(x)

    def image(self, g):
        rot, t = (g.rot, g.trans) if hasattr(g, "rot") else g
        off = la.vadd(la.matvec(rot, self.offset), t)
        dirs = tuple(la.matvec(rot, d) for d in self.dirs)
        return FixedTorus(off, dirs)

    def contains(self, x):
        p = _annihilator(self.dirs)
        return la.mod1(la.matvec(p, x)) == self.key[1]


def tori_intersect(a, b):
    pa, pb = _annihilator(a.dirs), _annihilator(b.dirs)
    m = tuple(pa) + tuple(pb)
    rhs = la.matvec(pa, a.offset) + la.matvec(pb, b.offset)
    offsets, _ = la.solve_mod_one(m, rhs)
    return bool(offsets)


@dataclass
class SingularComponent:
    id: str
    stratum: str
    words: tuple              # generator words of the elements fixing it pointwise
    torus: FixedTorus
    orbit: list               # all fixed tori in T^7 lying over this component
    isotropy_order: int
    isotropy: str
    normal_action: list = field(default_factory=list)

    @property
    def dimension(self):
        return self.torus.dim

    def to_json(self):
        return {
            "id": self.id,
            "stratum": self.stratum,
            "fixed_by": list(self.words),
            "dimension": self.dimension,
            "offset": [{"num": x.numerator, "den": x.denominator} for x in self.torus.offset],
            "directions": [[int(x) for x in d] for d in self.torus.dirs],
            "tori_in_cover": len(self.orbit),
            "isotropy": self.isotropy,
        }


@dataclass
class SingularSet:
    components: list
    flags: list
    elements: list

    def strata(self):
        out = {}
        for c in self.components:
            out[c.stratum] = out.get(c.stratum, 0) + 1
        return dict(sorted(out.items()))


def _stabilizer(elements, x):
    return [(el, w) for el, w in elements if apply(el, x) == la.mod1(x)]


def singular_components(G, strata_names=None):
    """Components of the singular set of T^7/G with generic isotropy.

    strata_names maps an element word (e.g. "iota1") to a stratum label.
    """
    elements = quotient_group_elements(G)
    ident = la.identity(N)
    tori = {}
    for el, w in elements:
        rot, t = el
        if rot == ident:
            continue
        offs, dirs = la.solve_mod_one(la.matsub(rot, ident), la.vscale(-1, t))
        for o in offs:
            ft = FixedTorus(o, dirs)
            tori.setdefault(ft.key, ft)
    flags = []
    tlist = sorted(tori.values(), key=lambda ft: (-ft.dim, ft.key))
    for a_i, a in enumerate(tlist):
        for b in tlist[a_i + 1:]:
            if tori_intersect(a, b):
                flags.append("fixed loci %s and %s intersect; isotropy jumps along the intersection"
                             % (_fmt(a.offset), _fmt(b.offset)))
    # G-orbits of tori
    seen = set()
    comps = []
    for ft in tlist:
        if ft.key in seen:
            continue
        orbit = {}
        for el, _ in elements:
            im = ft.image(el)
            orbit.setdefault(im.key, im)
        seen |= set(orbit)
        rep = min(orbit.values(), key=lambda x: (x.key[0], x.offset))
        stab = _stabilizer(elements, rep.generic_point())
        nontriv = [(el, w) for el, w in stab if w != "e"]
        words = tuple(sorted(w for _, w in nontriv))
        order = len(stab)
        rots = [el[0] for el, _ in stab]
        kind = _point_group_type_n(rots)
        stratum = words[0] if words else "?"
        if strata_names:
            stratum = strata_names.get(stratum, stratum)
        comps.append(SingularComponent("", stratum, words, rep, sorted(orbit.values(), key=lambda x: x.offset),
                                       order, kind, [el[0] for el, _ in nontriv]))
    comps.sort(key=lambda c: (c.stratum, c.torus.offset))
    counters = {}
    for c in comps:
        counters[c.stratum] = counters.get(c.stratum, 0) + 1
        c.id = "%s#%d" % (c.stratum, counters[c.stratum])
    return SingularSet(comps, flags, elements)


def _point_group_type_n(rots):
    n = len(rots)
    if n == 1:
        return "1"
    ident = la.identity(len(rots[0]))
    orders = []
    for r in rots:
        k, p = 1, r
        while p != ident:
            p = la.matmul(p, r)
            k += 1
        orders.append(k)
    if max(orders) == n:
        return "C%d" % n
    if n == 4 and max(orders) == 2:
        return "C2^2"
    return "order-%d" % n


def _fmt(v):
    return "(" + ",".join(str(x) for x in v) + ")"


# ---------------------------------------------------------------- local model

@dataclass
class LocalModel:
    gamma: str
    g_class: str
    tangent_lattice_gram: tuple
    rho: str
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"gamma": self.gamma, "G_class": self.g_class, "rho": self.rho,
                "tangent_gram": [[str(x) for x in r] for r in self.tangent_lattice_gram], "notes": self.notes}


def _normal_basis(dirs):
    return la.nullspace(tuple(dirs)) if dirs else la.identity(N)


def local_model(c, singular_set):
    """(Γ, class of G_α, ρ_α) for a computed component."""
    notes = []
    dirs = c.torus.dirs
    normal = _normal_basis(dirs)
    # normal action of each nontrivial pointwise stabilizer element
    for rot in c.normal_action:
        imgs = [la.matvec(rot, v) for v in normal]
        if imgs != [la.vscale(-1, v) for v in normal]:
            notes.append("normal action is not -1; Sp(1)-conjugacy not verified")
    gamma = c.isotropy
    # setwise stabilizer acting along the component
    tang = []
    dmat = la.transpose(dirs)
    for el, w in singular_set.elements:
        im = c.torus.image(el)
        if im.key != c.torus.key:
            continue
        rot = el[0]
        # action on the direction lattice: rot d_j = Σ m_ij d_i
        cols = [la.solve(dmat, la.matvec(rot, d)) for d in dirs]
        m = la.transpose(cols)
        tang.append((m, w))
    mats = []
    for m, _ in tang:
        if m not in mats:
            mats.append(m)
    g_class = _point_group_type(mats) if len(dirs) == 3 else "n/a"
    gram = tuple(tuple(la.dot(u, v) for v in dirs) for u in dirs)
    nontrivial = [w for m, w in tang if m != la.identity(len(dirs))]
    rho = "trivial" if not nontrivial else "via " + ",".join(sorted(nontrivial))
    return LocalModel(gamma, g_class, gram, rho, notes)


# ---------------------------------------------------------------- symmetries

@dataclass
class ComponentAction:
    permutation: dict        # component id -> component id
    fixed: list
    cycles: list
    induced: dict            # component id -> (rot restricted to the component's directions)

    def to_json(self):
        return {"permutation": self.permutation, "fixed": self.fixed, "cycles": self.cycles}


def normalizes(G, lam):
    els = {el for el, _ in quotient_group_elements(G)}
    lm = (lam.rot, la.mod1(lam.trans))
    lin = la.inverse(lam.rot)
    linv = (lin, la.mod1(la.vscale(-1, la.matvec(lin, lam.trans))))
    for g in G.generators:
        conj = compose(compose(lm, (g.rot, la.mod1(g.trans))), linv)
        if conj not in els:
            return False
    return True


def symmetry_action_on_components(G, lam, singular_set, form=PHI0):
    if not preserves_phi(lam, form):
        raise NotNormalizing("symmetry does not preserve phi0")
    if not normalizes(G, lam):
        raise NotNormalizing("symmetry does not normalize the group")
    index = {}
    for c in singular_set.components:
        for ft in c.orbit:
            index[ft.key] = c.id
    perm, induced = {}, {}
    for c in singular_set.components:
        im = c.torus.image(lam)
        if im.key not in index:
            raise NotNormalizing("image of %s is not a singular component" % c.id)
        perm[c.id] = index[im.key]
        dmat = la.transpose(c.torus.dirs)
        cols = [la.solve(dmat, la.matvec(lam.rot, d)) for d in c.torus.dirs]
        induced[c.id] = la.transpose(cols) if all(x is not None for x in cols) else None
    fixed = sorted(k for k, v in perm.items() if k == v)
    cycles, seen = [], set()
    for k in sorted(perm):
        if k in seen or perm[k] == k:
            continue
        cyc, x = [], k
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = perm[x]
        cycles.append(cyc)
    return ComponentAction(perm, fixed, cycles, induced)


def stabilizing_element(lam, c, singular_set):
    """An element λ∘g with g ∈ G that maps the component's chosen torus to itself.

    The induced action of λ on the component in Y_0 is represented by such a
    lift; returns (rot, trans) or None if λ moves the component.
    """
    for el, w in singular_set.elements:
        comp = compose((lam.rot, la.mod1(lam.trans)), el)
        if c.torus.image(comp).key == c.torus.key:
            return comp, w
    return None
