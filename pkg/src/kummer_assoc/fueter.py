"""Model of the linearized problem on S^1 x Σ: ∂_t + A with A symmetric.

Sections are m×n arrays: m samples on R/LZ, n spectral components. ∂_t is
applied spectrally (FFT in t), so trigonometric polynomials below the
Nyquist mode are differentiated exactly.

Norms: the Hölder norms are replaced by discrete graph norms at α = 1/32,

    |s|_1 = sup|s| + sup|∂_t s| + sup|A s| + [∂_t s]_α + [A s]_α
    |f|_0 = sup|f| + [f]_α

with [f]_α = max |f(t+d) - f(t)| / d^α over dyadic grid offsets d.
"""
from dataclasses import dataclass, field

import numpy as np

ALPHA = 1.0 / 32


class ConditionError(ValueError):
    pass


class ContractionFailure(RuntimeError):
    def __init__(self, msg, ratio, trace):
        super().__init__(msg)
        self.ratio = ratio
        self.trace = trace


class ThresholdError(ValueError):
    def __init__(self, msg, threshold):
        super().__init__(msg)
        self.threshold = threshold


# ---------------------------------------------------------------- operator

@dataclass
class SpectralOperator:
    A: np.ndarray
    L: float
    check_symmetric: bool = True
    tol: float = 1e-10

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A must be square")
        if self.L <= 0:
            raise ValueError("period L must be positive")
        if self.check_symmetric and not np.allclose(self.A, self.A.T, atol=1e-12):
            raise ValueError("A is not symmetric")
        sym = (self.A + self.A.T) / 2
        self.eigvals, self.eigvecs = np.linalg.eigh(sym)
        scale = max(1.0, float(np.max(np.abs(self.eigvals))) if self.n else 1.0)
        self.kernel_mask = np.abs(self.eigvals) <= self.tol * scale

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def kernel_basis(self):
        return self.eigvecs[:, self.kernel_mask]

    @property
    def kernel_dim(self):
        return int(np.sum(self.kernel_mask))

    def condition(self):
        nz = np.abs(self.eigvals[~self.kernel_mask])
        if nz.size == 0:
            return 1.0
        return float(nz.max() / nz.min())


def two_block_model(kernel=2, gap=1.0, spread=4.0, size=6, seed=0, L=1.0, torsion=None):
    """A = 0 (kernel block) ⊕ symmetric block with spectrum in [gap, gap*spread]."""
    rng = np.random.default_rng(seed)
    m = size - kernel
    q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    lam = np.linspace(gap, gap * spread, m)
    lam *= rng.choice([-1.0, 1.0], size=m)
    block = (q * lam) @ q.T
    A = np.zeros((size, size))
    A[kernel:, kernel:] = block
    if torsion is not None:
        A = A + np.asarray(torsion, dtype=float)
    return SpectralOperator(A, L)


@dataclass
class GridSection:
    values: np.ndarray
    L: float

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape[0] < 4:
            raise ValueError("need at least 4 time samples")

    @property
    def m(self):
        return self.values.shape[0]

    @property
    def h(self):
        return self.L / self.m

    def times(self):
        return np.arange(self.m) * self.h


def _dt(values, L):
    m = values.shape[0]
    k = 2 * np.pi * np.fft.fftfreq(m, d=L / m)
    if m % 2 == 0:
        k[m // 2] = 0.0  # Nyquist mode has no real derivative
    return np.real(np.fft.ifft(1j * k[:, None] * np.fft.fft(values, axis=0), axis=0))


def apply_dt_plus_A(op, s):
    if abs(s.L - op.L) > 1e-12 * op.L:
        raise ValueError("section period differs from the operator period")
    return GridSection(_dt(s.values, s.L) + s.values @ op.A.T, s.L)


def projector_Pi(op, s):
    """Time average of the pointwise projection onto ker A."""
    k = op.kernel_basis
    return k @ (k.T @ s.values.mean(axis=0))


def pi_section(op, s):
    return GridSection(np.tile(projector_Pi(op, s), (s.m, 1)), s.L)


# ---------------------------------------------------------------- norms

def holder_seminorm(values, L, alpha=ALPHA):
    m = values.shape[0]
    best = 0.0
    d = 1
    while d <= m // 2:
        diff = np.linalg.norm(np.roll(values, -d, axis=0) - values, axis=1).max()
        best = max(best, diff / (d * L / m) ** alpha)
        d *= 2
    return best


def sup(values):
    return float(np.linalg.norm(values, axis=1).max())


def norm1(op, s):
    ds = _dt(s.values, s.L)
    As = s.values @ op.A.T
    return sup(s.values) + sup(ds) + sup(As) + holder_seminorm(ds, s.L) + holder_seminorm(As, s.L)


def norm0(values, L):
    return sup(values) + holder_seminorm(values, L)


def l2(values):
    return float(np.sqrt(np.mean(np.sum(values ** 2, axis=1))))


# ---------------------------------------------------------------- estimate

def trial_sections(op, m, count, seed, max_mode=6):
    """Seeded random trigonometric sections plus the eigenmode catalogue."""
    rng = np.random.default_rng(seed)
    t = np.arange(m) * op.L / m
    out = []
    vecs = op.eigvecs
    for a in range(op.n):
        for nmode in range(0, 3):
            w = 2 * np.pi * nmode / op.L
            out.append(np.outer(np.cos(w * t), vecs[:, a]))
            if nmode:
                out.append(np.outer(np.sin(w * t), vecs[:, a]))
    for _ in range(count):
        vals = np.zeros((m, op.n))
        for nmode in range(0, max_mode + 1):
            w = 2 * np.pi * nmode / op.L
            amp = rng.standard_normal((2, op.n)) / (1 + nmode) ** rng.uniform(0, 2)
            vals += np.outer(np.cos(w * t), amp[0])
            if nmode:
                vals += np.outer(np.sin(w * t), amp[1])
        out.append(vals)
    return [GridSection(v, op.L) for v in out]


@dataclass
class EstimateResult:
    L: float
    c: float                  # sup |s|_1 / ((L+1)|Ds|_0 + |Πs|)
    c_perp: float             # same sup over sections with Πs = 0
    c_l2: float               # sup in L² norms
    oracle_l2: float          # exact mode-wise bound for c_l2
    trials: int

    def to_json(self):
        return {"L": self.L, "c": self.c, "c_perp": self.c_perp, "c_l2": self.c_l2,
                "oracle_l2": self.oracle_l2, "trials": self.trials}


def fourier_oracle(op, m):
    """max over modes (n, λ) ≠ (0, 0) of 1/((L+1)|2πin/L + λ|), and 1 for the Π part."""
    L = op.L
    best = 1.0
    modes = np.fft.fftfreq(m, d=1.0 / m)
    if m % 2 == 0:
        modes = modes[modes != -m // 2]  # Nyquist: ∂_t is set to zero there
    for lam, ker in zip(op.eigvals, op.kernel_mask):
        for nmode in modes:
            if ker and nmode == 0:
                continue
            z = abs(complex(0.0 if ker else lam, 2 * np.pi * nmode / L))
            best = max(best, 1.0 / ((L + 1) * z))
    return best


def estimate_constant(op, trials=200, seed=0, m=128):
    if op.condition() > 1e12:
        raise ConditionError("A restricted to (ker A)^⊥ has condition number %.3g > 1e12" % op.condition())
    c = c_perp = c_l2 = 0.0
    secs = trial_sections(op, m, trials, seed)
    for s in secs:
        ds = apply_dt_plus_A(op, s).values
        pi = projector_Pi(op, s)
        pin = float(np.linalg.norm(pi))
        den = (op.L + 1) * norm0(ds, op.L) + pin
        if den <= 1e-14:
            continue
        r = norm1(op, s) / den
        c = max(c, r)
        if pin <= 1e-12 * max(1.0, sup(s.values)):
            c_perp = max(c_perp, r)
        c_l2 = max(c_l2, l2(s.values) / ((op.L + 1) * l2(ds) + pin))
    return EstimateResult(op.L, c, c_perp, c_l2, fourier_oracle(op, m), len(secs))


def sweep_L(A, Ls=(1, 2, 4, 8, 16, 32, 64), trials=200, seed=0, m=128):
    rows = [estimate_constant(SpectralOperator(A, float(L)), trials, seed, m) for L in Ls]
    cs = [r.c for r in rows]
    return rows, max(cs) / min(cs)


# ---------------------------------------------------------------- structure checks

def selfadjointness_residual(op, m=32, samples=8, seed=0):
    """max |<(∂_t+A)u, v> - <u, (-∂_t+A)v>| / (|u||v|) over seeded trigonometric u, v."""
    rng = np.random.default_rng(seed)
    best = 0.0
    sym = SpectralOperator(op.A, op.L, check_symmetric=False)
    for _ in range(samples):
        u = GridSection(_smooth(rng, m, op.n, op.L), op.L)
        v = GridSection(_smooth(rng, m, op.n, op.L), op.L)
        du = apply_dt_plus_A(sym, u).values
        adj = -_dt(v.values, op.L) + v.values @ op.A.T  # formal adjoint assuming A = A^T
        lhs = np.sum(du * v.values) / m
        rhs = np.sum(u.values * adj) / m
        best = max(best, abs(lhs - rhs) / (l2(u.values) * l2(v.values)))
    return best


def _smooth(rng, m, n, L, modes=4):
    t = np.arange(m) * L / m
    vals = np.zeros((m, n))
    for k in range(modes + 1):
        w = 2 * np.pi * k / L
        vals += np.outer(np.cos(w * t), rng.standard_normal(n)) + np.outer(np.sin(w * t), rng.standard_normal(n))
    return vals


def dense_matrix(op, m):
    """∂_t + A on the m-point grid as an (m n)×(m n) matrix (row-major sections)."""
    eye = np.eye(m)
    dt = _dt(eye, op.L)          # column j: derivative of the j-th delta
    return np.kron(dt, np.eye(op.n)) + np.kron(eye, op.A)


def kernel_dimension(op, m=None):
    """dim {s : (∂_t + A)s = 0} on the grid; spectral count, dense check when small.

    The dense check uses an odd number of samples: on an even grid the
    Nyquist mode has zero derivative and would add a spurious copy of ker A.
    """
    spectral = op.kernel_dim
    m = m or 9
    if m % 2 == 0:
        raise ValueError("use an odd grid for the dense kernel check")
    if m * op.n <= 1200:
        sv = np.linalg.svd(dense_matrix(op, m), compute_uv=False)
        scale = max(1.0, sv.max()) if sv.size else 1.0
        dense = int(np.sum(sv <= 1e-9 * scale))
        if dense != spectral:
            raise AssertionError("dense nullity %d disagrees with dim ker A = %d" % (dense, spectral))
    return spectral


# ---------------------------------------------------------------- contraction

@dataclass
class ContractionProblem:
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 0.5
    alpha: float = ALPHA
    beta: float = 2.5
    gamma: float = 1.0
    t: float = 0.03125
    dim: int = 4
    seed: int = 0

    def __post_init__(self):
        if not 2 * self.beta > self.gamma:
            raise ValueError("need 2β > γ")
        if not 0 < self.t <= 1:
            raise ValueError("t must lie in (0, 1]")

    @property
    def c_E(self):
        # |E(0)| ≤ c2 t^-γ c1 t^β and Lip(E) ≤ c2 t^-γ (2 c3 r) on B_r
        return self.c2 * max(self.c1, 2 * self.c3)

    def radius(self, t=None):
        t = self.t if t is None else t
        return 2 * self.c_E * t ** (self.beta - self.gamma)

    def lipschitz(self, t=None):
        t = self.t if t is None else t
        return self.c_E * (self.radius(t) + t ** self.beta) * t ** (-self.gamma)


def threshold(p):
    """Largest t ≤ 1 with c_E (r + t^β) t^-γ ≤ 1/2 for r = 2 c_E t^(β-γ).

    Both displayed conditions reduce to this one: the first needs the
    quantity < 1, the second (divided by r) needs it ≤ 1/2.
    """
    if p.beta <= 2 * p.gamma:
        return 0.0  # r t^-γ does not decay; the displayed inequalities give no threshold
    q = lambda t: p.lipschitz(t)
    if q(1.0) <= 0.5:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if q(mid) <= 0.5:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class ModelMaps:
    """D^-1 = c2 t^-γ U (U orthogonal), N(v) = c3 (u·v) v with |u| = 1."""
    Dinv: np.ndarray
    u: np.ndarray
    c3: float

    def N(self, v):
        return self.c3 * float(self.u @ v) * v


def model_maps(p):
    rng = np.random.default_rng(p.seed)
    q, _ = np.linalg.qr(rng.standard_normal((p.dim, p.dim)))
    u = rng.standard_normal(p.dim)
    u /= np.linalg.norm(u)
    return ModelMaps(p.c2 * p.t ** (-p.gamma) * q, u, p.c3)


def default_error(p):
    rng = np.random.default_rng(p.seed + 1)
    e = rng.standard_normal(p.dim)
    return p.c1 * p.t ** p.beta * e / np.linalg.norm(e)


@dataclass
class ContractionResult:
    v: np.ndarray
    trace: list                 # |v_{k+1} - v_k|
    ratios: list
    iterations: int
    threshold: float
    radius: float
    lipschitz: float
    residual: float

    def to_json(self):
        return {"norm_v": float(np.linalg.norm(self.v)), "iterations": self.iterations,
                "threshold": self.threshold, "radius": self.radius, "lipschitz_bound": self.lipschitz,
                "max_ratio": max(self.ratios) if self.ratios else 0.0, "residual": self.residual,
                "trace": [float(x) for x in self.trace]}


def contraction_solve(p, e=None, max_iter=200, tol=1e-14, force=False, maps=None):
    """Iterate v <- -E(v), E(v) = D^-1(N(v) + e)."""
    T = threshold(p)
    if p.t > T and not force:
        raise ThresholdError("t = %g exceeds the threshold T = %g" % (p.t, T), T)
    maps = maps or model_maps(p)
    e = default_error(p) if e is None else np.asarray(e, dtype=float)
    E = lambda v: maps.Dinv @ (maps.N(v) + e)
    v = np.zeros_like(e)
    trace, ratios = [], []
    up = 0
    for k in range(max_iter):
        nxt = -E(v)
        step = float(np.linalg.norm(nxt - v))
        if trace and trace[-1] > 0:
            ratios.append(step / trace[-1])
            up = up + 1 if ratios[-1] >= 1 else 0
        trace.append(step)
        v = nxt
        if not np.all(np.isfinite(v)) or up >= 2:
            r = ratios[-1] if ratios else float("inf")
            raise ContractionFailure("iteration is not contracting: measured ratio %.3g" % r, r, trace)
        if step <= tol * max(1.0, float(np.linalg.norm(v))):
            break
    else:
        r = max(ratios[-5:]) if ratios else float("nan")
        if r >= 1:
            raise ContractionFailure("iteration is not contracting: measured ratio %.3g" % r, r, trace)
    res = float(np.linalg.norm(v + E(v)))
    return ContractionResult(v, trace, ratios, len(trace), T, p.radius(), p.lipschitz(), res)


def t_sweep(p, exponents=range(2, 11), e_scale=1.0):
    """‖v(t)‖ / t^(β-γ) over t = 2^-k; runs above the threshold are reported, not solved."""
    rows = []
    for k in exponents:
        t = 2.0 ** (-k)
        q = ContractionProblem(p.c1, p.c2, p.c3, p.alpha, p.beta, p.gamma, t, p.dim, p.seed)
        try:
            r = contraction_solve(q, default_error(q) * e_scale)
            rows.append({"t": t, "norm_v": float(np.linalg.norm(r.v)),
                         "scaled": float(np.linalg.norm(r.v)) / t ** (p.beta - p.gamma),
                         "iterations": r.iterations, "max_ratio": max(r.ratios) if r.ratios else 0.0,
                         "lipschitz_bound": r.lipschitz, "residual": r.residual, "status": "ok"})
        except ThresholdError as err:
            rows.append({"t": t, "status": "above-threshold", "threshold": err.threshold})
    return rows


# ---------------------------------------------------------------- scalar oracle

def scalar_quadratic(a, b, max_iter=500, tol=0.0):
    """Fixed point of v = a - b v², by iteration, against the closed-form root.

    The attracting root is v* = (sqrt(1 + 4ab) - 1) / (2b) (v* = a for b = 0),
    written as 2a / (1 + sqrt(1 + 4ab)) to avoid cancellation.
    """
    disc = 1 + 4 * a * b
    if disc < 0:
        raise ContractionFailure("no real fixed point (1 + 4ab < 0)", float("inf"), [])
    root = 2 * a / (1 + np.sqrt(disc))
    lip = abs(2 * b * root)
    if lip >= 1:
        raise ContractionFailure("fixed point is repelling: |2 b v*| = %.3g" % lip, lip, [])
    v = 0.0
    trace = []
    for _ in range(max_iter):
        nxt = a - b * v * v
        trace.append(abs(nxt - v))
        v = nxt
        if trace[-1] <= tol:
            break
    return v, root, trace
