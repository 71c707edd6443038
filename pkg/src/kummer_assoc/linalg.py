"""Small dense linear algebra over Q and Z.

Matrices are tuples of row tuples. Entries are Fractions (or ints, which
are promoted on the way in). Everything here is exact; sizes stay below
~30 so plain Gaussian elimination is fine.
"""
from fractions import Fraction
from functools import lru_cache
from math import gcd

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp


def frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, dict):
        return Fraction(int(x["num"]), int(x["den"]))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact input: %r" % x)
    return Fraction(x)


def mat(rows):
    return tuple(tuple(frac(x) for x in r) for r in rows)


def vec(xs):
    return tuple(frac(x) for x in xs)


def identity(n):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(m, n):
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(m))


def transpose(a):
    return tuple(zip(*a))


def matmul(a, b):
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in bt) for r in a)


def matvec(a, v):
    return tuple(sum((x * y for x, y in zip(r, v)), Fraction(0)) for r in a)


def matsub(a, b):
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def matadd(a, b):
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def vadd(u, v):
    return tuple(x + y for x, y in zip(u, v))


def vsub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def vscale(c, v):
    return tuple(c * x for x in v)


def dot(u, v):
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def kron(a, b):
    """Kronecker product, row-major: (a ⊗ b)[(i,k),(j,l)] = a[i][j] b[k][l]."""
    return tuple(
        tuple(a[i][j] * b[k][l] for j in range(len(a[0])) for l in range(len(b[0])))
        for i in range(len(a)) for k in range(len(b))
    )


def rref(a):
    """Reduced row echelon form. Returns (rows, pivot_columns); zero rows dropped."""
    m = [list(r) for r in a]
    if not m:
        return (), []
    nr, nc = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return tuple(tuple(row) for row in m[:r]), pivots


def rank(a):
    return len(rref(a)[1])


def nullspace(a, ncols=None):
    """Basis of {x : a x = 0} as a tuple of vectors (one per free column)."""
    if not a:
        n = ncols
        return tuple(tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n))
    n = len(a[0])
    rows, piv = rref(a)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(rows, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return tuple(basis)


def span_key(vectors, n):
    """Canonical key of a subspace: its RREF basis."""
    if not vectors:
        return ()
    return rref(tuple(vectors))[0]


def subspace_contains(big, small):
    """True iff span(small) ⊆ span(big); both given as lists of vectors."""
    if not small:
        return True
    if not big:
        return all(all(x == 0 for x in v) for v in small)
    return rank(tuple(big) + tuple(small)) == rank(tuple(big))


def intersect(u, v, n):
    """Intersection of two subspaces of Q^n given by spanning lists."""
    if not u or not v:
        return ()
    # x = Σ a_i u_i = Σ b_j v_j
    cols = list(u) + [vscale(-1, w) for w in v]
    a = transpose(cols)
    sols = nullspace(a)
    out = []
    for s in sols:
        x = [Fraction(0)] * n
        for coef, w in zip(s[: len(u)], u):
            x = [xi + coef * wi for xi, wi in zip(x, w)]
        out.append(tuple(x))
    return span_key(out, n)


def solve(a, b):
    """One solution of a x = b, or None."""
    n = len(a[0])
    aug = tuple(tuple(r) + (bi,) for r, bi in zip(a, b))
    rows, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(rows, piv):
        x[p] = row[n]
    return tuple(x)


def det(a):
    m = [list(r) for r in a]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def inverse(a):
    n = len(a)
    aug = tuple(tuple(r) + tuple(Fraction(int(i == j)) for j in range(n)) for i, r in enumerate(a))
    rows, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(r[n:]) for r in rows)


def is_integral(a):
    return all(x.denominator == 1 for r in a for x in r)


def primitive(v):
    """Scale a rational vector to a primitive integer vector (first nonzero entry positive)."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(Fraction(x) for x in ints)


def content(v):
    """gcd of the entries of an integer vector."""
    g = 0
    for x in v:
        if Fraction(x).denominator != 1:
            raise ValueError("non-integer vector")
        g = gcd(g, abs(int(x)))
    return g


def smith(a):
    """Smith normal form over Z: returns (D, U, V) with D = U a V, U and V unimodular."""
    return _smith(tuple(tuple(Fraction(x) for x in r) for r in a))


@lru_cache(maxsize=4096)
def _smith(a):
    m = Matrix([[int(x) for x in r] for r in a])
    d, u, v = smith_normal_decomp(m, domain=ZZ)
    conv = lambda M: tuple(tuple(Fraction(int(M[i, j])) for j in range(M.cols)) for i in range(M.rows))
    return conv(d), conv(u), conv(v)


def integer_kernel(a, ncols=None):
    """Basis of the saturated lattice ker(a) ∩ Z^n (a integral)."""
    if not a:
        return identity(ncols)
    n = len(a[0])
    d, _, v = smith(a)
    r = sum(1 for i in range(min(len(d), n)) if d[i][i] != 0)
    return tuple(tuple(v[i][j] for i in range(n)) for j in range(r, n))


def solve_mod_one(a, b):
    """All solutions of a x ≡ b (mod Z^n) for a square integral a.

    Returns (offsets, directions): the solution set on R^n/Z^n is the union of
    the affine subtori offset + span(directions). Offsets are in [0,1)^n after
    the caller canonicalizes; directions span ker(a) and form a basis of the
    saturated lattice ker(a) ∩ Z^n. Empty offsets means no solution.
    """
    n = len(a[0])
    d, u, v = smith(a)
    ub = matvec(u, b)
    diag = [d[i][i] if i < len(d) else Fraction(0) for i in range(n)]
    r = sum(1 for x in diag if x != 0)
    for i in range(r, len(ub)):
        if ub[i].denominator != 1:
            return [], ()
    # y_i = (ub_i + m_i) / d_i for i < r, free otherwise
    choices = [[(ub[i] + m) / diag[i] for m in range(abs(int(diag[i])))] for i in range(r)]
    offsets = []

    def rec(i, acc):
        if i == r:
            y = tuple(acc) + tuple(Fraction(0) for _ in range(n - r))
            offsets.append(matvec(v, y))
            return
        for c in choices[i]:
            rec(i + 1, acc + [c])

    rec(0, [])
    dirs = tuple(tuple(v[i][j] for i in range(n)) for j in range(r, n))
    return offsets, dirs


def mod1(v):
    return tuple(x - (x.numerator // x.denominator) for x in v)
