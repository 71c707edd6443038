import numpy as np
import pytest

from kummer_assoc import fueter as fu


@pytest.fixture(scope="module")
def op():
    return fu.two_block_model(seed=0)


def test_two_block_model_structure(op):
    assert op.kernel_dim == 2
    assert np.allclose(op.A, op.A.T)
    assert min(abs(l) for l, k in zip(op.eigvals, op.kernel_mask) if not k) >= 1 - 1e-12


def test_asymmetric_operator_rejected():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        fu.SpectralOperator(a, 1.0)


def test_dt_exact_on_trigonometric_section(op):
    m, L = 32, 2.0
    t = np.arange(m) * L / m
    vals = np.outer(np.sin(2 * np.pi * t / L), np.ones(op.n))
    s = fu.GridSection(vals, L)
    d = fu._dt(s.values, L)
    assert np.allclose(d, np.outer(2 * np.pi / L * np.cos(2 * np.pi * t / L), np.ones(op.n)), atol=1e-10)


def test_grid_too_small():
    with pytest.raises(ValueError):
        fu.GridSection(np.zeros((2, 3)), 1.0)


def test_kernel_dimension_dense_check(op):
    assert fu.kernel_dimension(op) == 2


def test_selfadjointness(op):
    assert fu.selfadjointness_residual(op) < 1e-10
    a = op.A.copy()
    a[0, 1] += 1e-3
    bad = fu.SpectralOperator(a, 1.0, check_symmetric=False)
    assert fu.selfadjointness_residual(bad) > 1e-6


def test_estimate_bounded_by_oracle(op):
    res = fu.estimate_constant(op, trials=60, seed=1, m=64)
    assert res.c_l2 <= res.oracle_l2 * (1 + 1e-9)
    assert 0 < res.c_perp <= res.c


def test_sweep_flat_after_normalization(op):
    rows, spread = fu.sweep_L(op.A, Ls=(1, 8, 64), trials=60, seed=2, m=64)
    assert spread <= 1.10
    assert rows[-1].c_perp < rows[0].c_perp


def test_ill_conditioned_rejected():
    a = np.diag([0.0, 1e-14, 1.0])
    with pytest.raises(fu.ConditionError):
        fu.estimate_constant(fu.SpectralOperator(a, 1.0, tol=1e-16), trials=5)


def test_threshold_and_regime():
    p = fu.ContractionProblem()
    T = fu.threshold(p)
    assert 0 < T < 1
    assert p.lipschitz(T) <= 0.5 + 1e-12
    assert fu.threshold(fu.ContractionProblem(beta=2.0, gamma=1.0)) == 0.0


def test_contraction_converges_below_threshold():
    p = fu.ContractionProblem(t=2.0 ** -7)
    r = fu.contraction_solve(p)
    assert r.residual <= 1e-12
    assert np.linalg.norm(r.v) <= p.radius()
    assert max(r.ratios) <= r.lipschitz


def test_threshold_gate():
    with pytest.raises(fu.ThresholdError):
        fu.contraction_solve(fu.ContractionProblem(t=0.5))


def test_out_of_regime_detected():
    with pytest.raises(fu.ContractionFailure) as exc:
        fu.contraction_solve(fu.ContractionProblem(c1=50.0, c2=5.0, c3=5.0, t=1.0), force=True)
    assert exc.value.ratio >= 1


def test_sweep_scaling():
    p = fu.ContractionProblem()
    rows = fu.t_sweep(p)
    ok = [r for r in rows if r["status"] == "ok"]
    assert len(ok) >= 3
    assert all(r["scaled"] <= 2 * p.c_E for r in ok)


@pytest.mark.parametrize("a,b", [(0.3, 0.5), (1.0, 0.1), (-0.2, 0.7), (0.0, 1.0), (0.4, 0.0)])
def test_scalar_closed_form(a, b):
    v, root, trace = fu.scalar_quadratic(a, b)
    assert abs(v - root) <= 1e-12
    assert abs(root - (a - b * root * root)) <= 1e-15


def test_scalar_repelling_reported():
    with pytest.raises(fu.ContractionFailure):
        fu.scalar_quadratic(3.0, 1.0)
