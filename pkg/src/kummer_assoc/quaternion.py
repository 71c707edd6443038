"""Exact quaternions, the flat G2 forms on R^7, and the map SO(H) -> SO(Im H).

Coordinates on H are (re, i, j, k); on Im H they are (i, j, k). Indices of
R^7 are 0-based in code (x1 is index 0).
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from . import linalg as la


@dataclass(frozen=True)
class Quat:
    re: Fraction = Fraction(0)
    i: Fraction = Fraction(0)
    j: Fraction = Fraction(0)
    k: Fraction = Fraction(0)

    def __post_init__(self):
        for f in ("re", "i", "j", "k"):
            object.__setattr__(self, f, la.frac(getattr(self, f)))

    @classmethod
    def from_tuple(cls, t):
        return cls(*t)

    def as_tuple(self):
        return (self.re, self.i, self.j, self.k)

    def __add__(self, o):
        return Quat(*(a + b for a, b in zip(self.as_tuple(), o.as_tuple())))

    def __sub__(self, o):
        return Quat(*(a - b for a, b in zip(self.as_tuple(), o.as_tuple())))

    def __neg__(self):
        return Quat(*(-a for a in self.as_tuple()))

    def __mul__(self, o):
        if not isinstance(o, Quat):
            return Quat(*(a * la.frac(o) for a in self.as_tuple()))
        return quat_mul(self, o)

    __rmul__ = lambda self, c: Quat(*(a * la.frac(c) for a in self.as_tuple()))

    def conj(self):
        return Quat(self.re, -self.i, -self.j, -self.k)

    def norm2(self):
        return sum(a * a for a in self.as_tuple())

    def imag(self):
        return ImVec(self.i, self.j, self.k)


def quat_mul(p, q):
    """Hamilton product."""
    a1, b1, c1, d1 = p.as_tuple()
    a2, b2, c2, d2 = q.as_tuple()
    return Quat(
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


ONE = Quat(1, 0, 0, 0)
I = Quat(0, 1, 0, 0)
J = Quat(0, 0, 1, 0)
K = Quat(0, 0, 0, 1)


@dataclass(frozen=True)
class ImVec:
    i: Fraction = Fraction(0)
    j: Fraction = Fraction(0)
    k: Fraction = Fraction(0)

    def __post_init__(self):
        for f in ("i", "j", "k"):
            object.__setattr__(self, f, la.frac(getattr(self, f)))

    def as_tuple(self):
        return (self.i, self.j, self.k)

    def quat(self):
        return Quat(0, self.i, self.j, self.k)

    def __add__(self, o):
        return ImVec(*la.vadd(self.as_tuple(), o.as_tuple()))

    def __sub__(self, o):
        return ImVec(*la.vsub(self.as_tuple(), o.as_tuple()))

    def __neg__(self):
        return ImVec(*(-a for a in self.as_tuple()))

    def scale(self, c):
        return ImVec(*la.vscale(la.frac(c), self.as_tuple()))

    def dot(self, o):
        return la.dot(self.as_tuple(), o.as_tuple())

    def norm2(self):
        return self.dot(self)


def bracket(u, v):
    """Commutator uv - vu of imaginary quaternions; stays imaginary."""
    w = quat_mul(u.quat(), v.quat()) - quat_mul(v.quat(), u.quat())
    assert w.re == 0
    return w.imag()


# ---------------------------------------------------------------- G2 forms

def _perm_sign(seq):
    seq = list(seq)
    s = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                s = -s
    return s


def _sorted_with_sign(idx):
    if len(set(idx)) < len(idx):
        return None, 0
    return tuple(sorted(idx)), _perm_sign(idx)


class AltForm:
    """Alternating p-form on R^n stored as {sorted index tuple: coefficient}."""

    def __init__(self, n, p, coeffs):
        self.n, self.p = n, p
        self.c = {}
        for idx, v in coeffs.items():
            key, s = _sorted_with_sign(idx)
            if s == 0:
                continue
            v = la.frac(v) * s
            self.c[key] = self.c.get(key, Fraction(0)) + v
        self.c = {k: v for k, v in self.c.items() if v != 0}

    def __eq__(self, o):
        return (self.n, self.p, self.c) == (o.n, o.p, o.c)

    def __call__(self, *vs):
        """Evaluate on p vectors."""
        total = Fraction(0)
        for idx, coef in self.c.items():
            # determinant of the p×p minor
            minor = tuple(tuple(v[a] for a in idx) for v in vs)
            total += coef * la.det(minor)
        return total

    def wedge(self, o):
        out = {}
        for a, x in self.c.items():
            for b, y in o.c.items():
                key, s = _sorted_with_sign(a + b)
                if s:
                    out[key] = out.get(key, Fraction(0)) + s * x * y
        return AltForm(self.n, self.p + o.p, out)

    def interior(self, v):
        """i_v of the form."""
        out = {}
        for idx, coef in self.c.items():
            for pos, a in enumerate(idx):
                if v[a] == 0:
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                out[rest] = out.get(rest, Fraction(0)) + (-1) ** pos * coef * v[a]
        return AltForm(self.n, self.p - 1, out)

    def hodge(self):
        """Euclidean Hodge star with e_1 ∧ ... ∧ e_n positive."""
        out = {}
        full = tuple(range(self.n))
        for idx, coef in self.c.items():
            rest = tuple(a for a in full if a not in idx)
            out[rest] = coef * _perm_sign(idx + rest)
        return AltForm(self.n, self.n - self.p, out)

    def pullback(self, m):
        """(m^* form)(v1..vp) = form(m v1, ..., m vp) for a square matrix m."""
        out = {}
        cols = la.transpose(m)
        for idx in combinations(range(self.n), self.p):
            val = self(*(cols[a] for a in idx))
            if val:
                out[idx] = val
        return AltForm(self.n, self.p, out)


def _w(*one_based):
    return tuple(a - 1 for a in one_based)


class G2Form:
    """The flat G2 3-form phi0 and psi0 = *phi0 on R^7."""

    def __init__(self, phi=None):
        if phi is None:
            # dx123 - dx1∧ω1 - dx2∧ω2 - dx3∧ω3 with
            # ω1 = dx45 + dx67, ω2 = dx46 + dx75, ω3 = dx47 + dx56
            phi = AltForm(7, 3, {
                _w(1, 2, 3): 1,
                _w(1, 4, 5): -1, _w(1, 6, 7): -1,
                _w(2, 4, 6): -1, _w(2, 7, 5): -1,
                _w(3, 4, 7): -1, _w(3, 5, 6): -1,
            })
        self.phi = phi
        self.psi = phi.hodge()

    def metric(self, u, v):
        """g(u,v) from (i_u φ)∧(i_v φ)∧φ = 6 g(u,v) vol."""
        top = self.phi.interior(u).wedge(self.phi.interior(v)).wedge(self.phi)
        return top.c.get(tuple(range(7)), Fraction(0)) / 6


PHI0 = G2Form()


def basis7(a):
    return tuple(Fraction(int(a == b)) for b in range(7))


def cross(u, v, form=PHI0):
    """u × v defined by <u×v, w> = phi(u, v, w)."""
    u, v = la.vec(u), la.vec(v)
    return tuple(form.phi(u, v, basis7(c)) for c in range(7))


def associator(u, v, w, form=PHI0):
    """[u,v,w] defined by <[u,v,w], x> = psi(u, v, w, x)."""
    u, v, w = la.vec(u), la.vec(v), la.vec(w)
    return tuple(form.psi(u, v, w, basis7(c)) for c in range(7))


def associator_rhs(u, v, w, form=PHI0):
    """(u×v)×w + <v,w>u - <u,w>v, computed through cross only."""
    u, v, w = la.vec(u), la.vec(v), la.vec(w)
    first = cross(cross(u, v, form), w, form)
    return tuple(a + la.dot(v, w) * b - la.dot(u, w) * c for a, b, c in zip(first, u, v))


# ---------------------------------------------------------------- rotations

@dataclass(frozen=True)
class Rotation:
    """Rational orthogonal matrix (3×3 on Im H or 4×4 on H)."""
    m: tuple

    def __post_init__(self):
        m = la.mat(self.m)
        object.__setattr__(self, "m", m)
        n = len(m)
        if la.matmul(la.transpose(m), m) != la.identity(n):
            raise ValueError("matrix is not orthogonal")

    @property
    def det(self):
        return int(la.det(self.m))

    def __matmul__(self, o):
        return Rotation(la.matmul(self.m, o.m))

    def apply(self, v):
        return la.matvec(self.m, la.vec(v))


Rotation3 = Rotation4 = Rotation


def quat_rotation(a, b):
    """The map q -> a q conj(b) as a 4×4 matrix; a, b unit quaternions."""
    if a.norm2() != 1 or b.norm2() != 1:
        raise ValueError("unit quaternions required")
    cols = [quat_mul(quat_mul(a, e), b.conj()).as_tuple() for e in (ONE, I, J, K)]
    return Rotation(la.transpose(cols))


def unit_from(c):
    """c^2/|c|^2: a rational unit quaternion from any nonzero rational c."""
    return quat_mul(c, c) * (1 / c.norm2())


# self-dual 2-forms on H with coordinates x0..x3 = (re, i, j, k)
_SELF_DUAL = [
    AltForm(4, 2, {(0, 1): 1, (2, 3): 1}),
    AltForm(4, 2, {(0, 2): 1, (3, 1): 1}),
    AltForm(4, 2, {(0, 3): 1, (1, 2): 1}),
]


def lambda_plus(r):
    """Induced rotation on self-dual 2-forms, identified with Im H via ω_i, ω_j, ω_k."""
    if len(r.m) != 4:
        raise ValueError("4×4 rotation expected")
    if r.det != 1:
        raise ValueError("lambda_plus is defined on SO(H); got det = %d" % r.det)
    rinv = la.transpose(r.m)
    out = [[Fraction(0)] * 3 for _ in range(3)]
    for b, om in enumerate(_SELF_DUAL):
        pushed = om.pullback(rinv)  # R_* ω = (R^{-1})^* ω
        for a, ref in enumerate(_SELF_DUAL):
            # <ω_a, ω_b> = 2 δ_ab in the coefficient inner product
            out[a][b] = sum(pushed.c.get(key, Fraction(0)) * v for key, v in ref.c.items()) / 2
    return Rotation(out)


def diag3(a, b, c):
    return Rotation(((a, 0, 0), (0, b, 0), (0, 0, c)))
