"""Bieberbach groups on Im H, central axes, and the base orbifolds M/H.

All torus computations happen in lattice coordinates: a point of Im H/Λ is
a vector in [0,1)^3, a rotation is an integer matrix acting on lattice
coordinates, and a translation is a rational vector.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import linalg as la
from .quaternion import ImVec, Rotation

CLASSES = ("1", "C2", "C3", "C4", "C6", "C2^2")

# Integer matrices in lattice coordinates; column j is the image of λ_{j+1}.
R2 = la.mat(((1, 0, 0), (0, -1, 0), (0, 0, -1)))
R3 = la.mat(((1, 0, 0), (0, -1, 1), (0, -1, 0)))
R4 = la.mat(((1, 0, 0), (0, 0, 1), (0, -1, 0)))
R6 = la.mat(((1, 0, 0), (0, 1, -1), (0, 1, 0)))
RPLUS = la.mat(((1, 0, 0), (0, -1, 0), (0, 0, -1)))
RMINUS = la.mat(((-1, 0, 0), (0, 1, 0), (0, 0, -1)))

HEX_GRAM = la.mat(((1, 0, 0), (0, 2, -1), (0, -1, 2)))


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class Lattice:
    gram: tuple
    basis: tuple = None  # optional ImVec triple when the basis is rational

    def __post_init__(self):
        object.__setattr__(self, "gram", la.mat(self.gram))
        g = self.gram
        if la.transpose(g) != g:
            raise ConstraintError("Gram matrix is not symmetric")
        minors = [g[0][0], la.det(tuple(r[:2] for r in g[:2])), la.det(g)]
        if any(m <= 0 for m in minors):
            raise ConstraintError("Gram matrix is not positive definite")
        if self.basis is not None:
            b = [v.as_tuple() for v in self.basis]
            derived = tuple(tuple(la.dot(u, v) for v in b) for u in b)
            if derived != g:
                raise ConstraintError("basis does not match the Gram matrix")

    @classmethod
    def from_basis(cls, vectors):
        vs = tuple(v if isinstance(v, ImVec) else ImVec(*v) for v in vectors)
        b = [v.as_tuple() for v in vs]
        gram = tuple(tuple(la.dot(u, v) for v in b) for u in b)
        return cls(gram, vs)

    def basis_matrix(self):
        """3×3 matrix with the basis vectors as columns (ambient coordinates)."""
        if self.basis is None:
            return None
        return la.transpose([v.as_tuple() for v in self.basis])


CUBIC = Lattice.from_basis(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


@dataclass(frozen=True)
class AffineIsometry:
    rot: tuple    # integer matrix in lattice coordinates
    trans: tuple  # rational lattice coordinates

    def __post_init__(self):
        object.__setattr__(self, "rot", la.mat(self.rot))
        object.__setattr__(self, "trans", la.vec(self.trans))
        if not la.is_integral(self.rot) or abs(la.det(self.rot)) != 1:
            raise ConstraintError("rotation part does not preserve the lattice")

    def compose(self, o):
        """self ∘ o."""
        return AffineIsometry(la.matmul(self.rot, o.rot), la.vadd(la.matvec(self.rot, o.trans), self.trans))

    def mod_lattice(self):
        return AffineIsometry(self.rot, la.mod1(self.trans))

    def __call__(self, x):
        return la.vadd(la.matvec(self.rot, x), self.trans)

    def key(self):
        return (self.rot, self.trans)


IDENTITY = AffineIsometry(la.identity(3), (0, 0, 0))


@dataclass(frozen=True)
class BieberbachGroup:
    cls: str
    lattice: Lattice
    generators: tuple = field(default_factory=tuple)

    def rotation_parts(self):
        return [g.rot for g in self.generators]

    def ambient_rotation(self, m):
        """Rotation3 in the orthonormal frame, when the basis is rational."""
        b = self.lattice.basis_matrix()
        if b is None:
            return None
        return Rotation(la.matmul(la.matmul(b, m), la.inverse(b)))

    def elements(self, bound=64):
        """Coset representatives of H = G/Λ, canonicalized mod Λ."""
        return close_group(self.generators, 3, bound)

    def to_json(self):
        return {
            "class": self.cls,
            "gram": [[_rj(x) for x in r] for r in self.lattice.gram],
            "basis": None if self.lattice.basis is None else [[_rj(x) for x in v.as_tuple()] for v in self.lattice.basis],
            "generators": [{"rot": [[int(x) for x in r] for r in g.rot], "trans": [_rj(x) for x in g.trans]} for g in self.generators],
        }

    @classmethod
    def from_json(cls, d):
        if d.get("basis"):
            lat = Lattice.from_basis([ImVec(*(la.frac(x) for x in v)) for v in d["basis"]])
        else:
            lat = Lattice(la.mat(d["gram"]))
        gens = tuple(AffineIsometry(g["rot"], g["trans"]) for g in d.get("generators", ()))
        return make_bieberbach(d["class"], lat, gens)


def _rj(x):
    x = la.frac(x)
    return {"num": x.numerator, "den": x.denominator}


def close_group(generators, n, bound=64):
    """All affine classes (R, t mod Z^n) generated by the given isometries."""
    ident = (la.identity(n), tuple(Fraction(0) for _ in range(n)))
    gens = [(g.rot, la.mod1(g.trans)) if hasattr(g, "rot") else (g[0], la.mod1(g[1])) for g in generators]
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = (la.matmul(g[0], a[0]), la.mod1(la.vadd(la.matvec(g[0], a[1]), g[1])))
                if c not in seen:
                    if len(seen) >= bound:
                        raise RuntimeError("group closure exceeded %d elements" % bound)
                    seen.add(c)
                    order.append(c)
                    nxt.append(c)
        frontier = nxt
    return order


def _check(cond, msg):
    if not cond:
        raise ConstraintError(msg)


def _check_gram(cls, g):
    if cls in ("C2", "C3", "C4", "C6", "C2^2"):
        _check(g[0][1] == 0, "<λ1,λ2> = 0 violated (got %s)" % g[0][1])
        _check(g[0][2] == 0, "<λ1,λ3> = 0 violated (got %s)" % g[0][2])
    if cls in ("C3", "C6"):
        _check(g[1][1] == g[2][2], "|λ2|² = |λ3|² violated")
        _check(g[1][1] == -2 * g[1][2], "|λ2|² = -2<λ2,λ3> violated")
    if cls in ("C4", "C2^2"):
        _check(g[1][2] == 0, "<λ2,λ3> = 0 violated (got %s)" % g[1][2])
    if cls == "C4":
        _check(g[1][1] == g[2][2], "|λ2| = |λ3| violated")


def _default_generators(cls):
    h = Fraction(1, 2)
    return {
        "1": (),
        "C2": (AffineIsometry(R2, (h, 0, 0)),),
        "C3": (AffineIsometry(R3, (Fraction(1, 3), 0, 0)),),
        "C4": (AffineIsometry(R4, (Fraction(1, 4), 0, 0)),),
        "C6": (AffineIsometry(R6, (Fraction(1, 6), 0, 0)),),
        "C2^2": (AffineIsometry(RPLUS, (h, h, 0)), AffineIsometry(RMINUS, (0, h, h))),
    }[cls]


def _point_group_type(rots):
    """Identify the finite group generated by integer matrices."""
    els = [e[0] for e in close_group([(r, (0, 0, 0)) for r in rots], 3)]
    n = len(els)
    if n == 1:
        return "1"
    orders = []
    for e in els:
        k, p = 1, e
        while p != la.identity(3):
            p = la.matmul(p, e)
            k += 1
        orders.append(k)
    if max(orders) == n:
        return "C%d" % n
    if n == 4 and max(orders) == 2:
        return "C2^2"
    return "order-%d" % n


def make_bieberbach(cls, lattice=None, generators=None):
    """Build a group of the given class; the default data is the standard normal form."""
    if cls not in CLASSES:
        raise ConstraintError("unknown class %r" % cls)
    if lattice is None:
        lattice = Lattice(HEX_GRAM) if cls in ("C3", "C6") else CUBIC
    if not isinstance(lattice, Lattice):
        lattice = Lattice(la.mat(lattice))
    _check_gram(cls, lattice.gram)
    gens = tuple(generators) if generators is not None else _default_generators(cls)
    g = lattice.gram
    for x in gens:
        _check(la.matmul(la.matmul(la.transpose(x.rot), g), x.rot) == g,
               "generator rotation is not an isometry of the lattice")
        _check(la.det(x.rot) == 1, "generator rotation has det -1")
    kind = _point_group_type([x.rot for x in gens])
    _check(kind == cls, "generators give point group %s, not %s" % (kind, cls))
    return BieberbachGroup(cls, lattice, gens)


def torsion_free_check(G):
    """(True, None) if H acts freely on Im H/Λ, else (False, (element, fixed point))."""
    for rot, t in G.elements():
        if rot == la.identity(3):
            continue
        a = la.matsub(rot, la.identity(3))
        offsets, _ = la.solve_mod_one(a, la.vscale(-1, t))
        if offsets:
            return False, ((rot, t), la.mod1(offsets[0]))
    return True, None


# ---------------------------------------------------------------- axes

@dataclass(frozen=True)
class AxisCandidate:
    xi: tuple          # primitive integer lattice coordinates
    signs: tuple       # eigenvalue of each generator rotation on xi
    subspace_dim: int  # dimension of the joint eigenspace it was drawn from


def _primitive_in(subspace, height):
    """Primitive integer vectors (up to sign) in a rational subspace with max |coord| ≤ height."""
    out = set()
    rng = range(-height, height + 1)
    for v in product(rng, repeat=3):
        if not any(v) or la.content(v) != 1:
            continue
        fv = la.vec(v)
        if la.subspace_contains(subspace, [fv]):
            out.add(la.primitive(fv))
    return sorted(out)


def eligible_axes(G, height=2):
    """Primitive lattice vectors that are eigenvectors of every rotation part.

    Joint eigenspaces of dimension ≥ 2 contain infinitely many primitive
    vectors; these are sampled up to the given height.
    """
    rots = G.rotation_parts()
    found = {}
    for signs in product((1, -1), repeat=len(rots)):
        space = la.identity(3)
        for s, r in zip(signs, rots):
            shifted = tuple(tuple(x - (s if i == j else 0) for j, x in enumerate(row)) for i, row in enumerate(r))
            k = la.nullspace(shifted)
            space = la.intersect(space, k, 3)
            if not space:
                break
        if not space:
            continue
        dim = len(space)
        cands = [la.primitive(space[0])] if dim == 1 else _primitive_in(space, height)
        for v in cands:
            found.setdefault(v, AxisCandidate(v, tuple(signs), dim))
    return sorted(found.values(), key=lambda a: (a.subspace_dim, sorted(abs(x) for x in a.xi), a.xi))


def is_eigen_axis(xi, G):
    xi = la.vec(xi)
    for r in G.rotation_parts():
        rx = la.matvec(r, xi)
        if rx != xi and rx != la.vscale(-1, xi):
            return False
    return True


def is_central(xi, G):
    """Translation by xi commutes with every generator: R xi = xi."""
    xi = la.vec(xi)
    return all(la.matvec(r, xi) == xi for r in G.rotation_parts())


def is_primitive(xi):
    return la.content(la.vec(xi)) == 1


# ---------------------------------------------------------------- base orbifold

def adapted_basis(xi):
    """Unimodular integer matrix whose first column is xi (xi primitive)."""
    xi = la.vec(xi)
    if not is_primitive(xi):
        raise ConstraintError("axis %s is not primitive" % (xi,))
    d, u, v = la.smith(tuple((x,) for x in xi))
    b = la.inverse(u)
    sign = d[0][0] * v[0][0]  # xi = U^{-1} D V^{-1} = sign * first column of B
    b = tuple((r[0] * sign,) + tuple(r[1:]) for r in b)
    assert tuple(r[0] for r in b) == xi
    return b


@dataclass
class BaseOrbifold:
    xi: tuple
    quotient_basis: tuple          # B: columns xi, b2, b3 in lattice coordinates
    singular_points: list          # (canonical point in [0,1)^2, isotropy order)
    topology: str
    euler_underlying: Fraction
    orientable: bool
    mirrors: int = 0

    @property
    def n_f(self):
        return len(self.singular_points)

    @property
    def isotropy_orders(self):
        return sorted((o for _, o in self.singular_points), reverse=True)

    def euler_orbifold(self):
        return self.euler_underlying - sum(1 - Fraction(1, o) for _, o in self.singular_points)

    def to_json(self):
        return {
            "xi": [int(x) for x in self.xi],
            "n_f": self.n_f,
            "topology": self.topology,
            "orientable": self.orientable,
            "singular_points": [{"point": [_rj(x) for x in p], "isotropy": "C%d" % o} for p, o in self.singular_points],
            "euler_underlying": _rj(self.euler_underlying),
            "euler_orbifold": _rj(self.euler_orbifold()),
        }


def induced_torus_action(G, xi):
    """Affine maps of M = R^2/Z^2 induced by each element of H, in the adapted basis."""
    b = adapted_basis(xi)
    binv = la.inverse(b)
    out = []
    for rot, t in G.elements():
        m = la.matmul(la.matmul(binv, rot), b)
        s = la.matvec(binv, t)
        assert m[1][0] == 0 and m[2][0] == 0
        a = tuple(tuple(r[1:]) for r in m[1:])
        out.append((a, la.mod1(s[1:])))
    return b, out


def base_orbifold(G, xi):
    xi = la.vec(xi)
    if not is_primitive(xi) or not is_eigen_axis(xi, G):
        raise ConstraintError("axis %s is not eligible (Zξ is not normal)" % (xi,))
    b, action = induced_torus_action(G, xi)
    i2 = la.identity(2)
    kernel = [e for e in action if e[0] == i2 and not any(e[1])]
    eff = len(action) // len(kernel)
    points = set()
    mirrors = 0
    fix_euler = Fraction(0)
    for a, s in action:
        if a == i2:
            continue
        offsets, dirs = la.solve_mod_one(la.matsub(a, i2), la.vscale(-1, s))
        if dirs:
            mirrors += len(offsets)
            continue
        pts = {la.mod1(o) for o in offsets}
        fix_euler += len(pts)
        points |= pts
    # Lefschetz/Burnside: χ(M/H) = (1/|H|) Σ_h χ(Fix h); χ(T²) = 0 for the identity
    euler_under = fix_euler / len(action)
    orbits = []
    remaining = set(points)
    while remaining:
        p = min(remaining)
        orb = {la.mod1(la.vadd(la.matvec(a, p), s)) for a, s in action}
        stab = sum(1 for a, s in action if la.mod1(la.vadd(la.matvec(a, p), s)) == p)
        remaining -= orb
        orbits.append((min(orb), stab // len(kernel)))
    orbits.sort()
    orientable = all(la.det(a) == 1 for a, _ in action)
    if mirrors:
        topo = "orbifold-with-mirrors"
    elif orientable:
        topo = {2: "sphere", 0: "torus"}.get(int(euler_under), "orientable-genus?")
    else:
        topo = {1: "projective-plane", 0: "klein-bottle"}.get(int(euler_under), "nonorientable?")
    return BaseOrbifold(tuple(int(x) for x in xi), b, orbits, topo, euler_under, orientable, mirrors)


def quotient_action_matrix(G, xi, kappa):
    """Action of an affine map kappa on H_1 of the torus M = (Im H/Rξ)/(Λ/Zξ)."""
    xi = la.vec(xi)
    rot = kappa.rot if isinstance(kappa, AffineIsometry) else la.mat(kappa)
    kx = la.matvec(rot, xi)
    if kx != xi and kx != la.vscale(-1, xi):
        raise ConstraintError("kappa does not normalize Zξ")
    if not la.is_integral(rot) or abs(la.det(rot)) != 1:
        raise ConstraintError("kappa does not normalize the lattice")
    b = adapted_basis(xi)
    m = la.matmul(la.matmul(la.inverse(b), rot), b)
    return tuple(tuple(int(x) for x in r[1:]) for r in m[1:])


def invariant_dimension(a):
    """dim of the subspace of Hom(H_1, R) fixed by the transpose action of a."""
    at = la.transpose(la.mat(a))
    n = len(at)
    return len(la.nullspace(la.matsub(at, la.identity(n))))


# (class, axis) -> (n_f, isotropy orders, topology) for the default normal forms
REFERENCE_TABLE = {
    ("C2", (1, 0, 0)): (4, [2, 2, 2, 2], "sphere"),
    ("C2", (0, 1, 0)): (0, [], "klein-bottle"),
    ("C3", (1, 0, 0)): (3, [3, 3, 3], "sphere"),
    ("C4", (1, 0, 0)): (3, [4, 4, 2], "sphere"),
    ("C6", (1, 0, 0)): (3, [6, 3, 2], "sphere"),
    ("C2^2", (1, 0, 0)): (2, [2, 2], "projective-plane"),
}
