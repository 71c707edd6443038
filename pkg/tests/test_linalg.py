from fractions import Fraction as F

import pytest

from kummer_assoc import linalg as la


def test_frac_rejects_float_accepts_rational_json():
    assert la.frac({"num": 3, "den": 6}) == F(1, 2)
    assert la.frac("2/3") == F(2, 3)
    with pytest.raises(TypeError):
        la.frac(0.5)


def test_nullspace_and_rank():
    a = la.mat([[1, 2, 3], [2, 4, 6]])
    ns = la.nullspace(a)
    assert len(ns) == 2 and la.rank(a) == 1
    for v in ns:
        assert la.matvec(a, v) == (0, 0)


def test_inverse_and_det():
    a = la.mat([[2, 1], [7, 4]])
    assert la.det(a) == 1
    assert la.matmul(a, la.inverse(a)) == la.identity(2)
    with pytest.raises(ZeroDivisionError):
        la.inverse(la.mat([[1, 2], [2, 4]]))


def test_span_key_is_basis_independent():
    u = [la.vec([1, 1, 0]), la.vec([0, 1, 1])]
    v = [la.vec([1, 2, 1]), la.vec([1, 0, -1])]
    assert la.span_key(u, 3) == la.span_key(v, 3)
    assert la.subspace_contains(u, [la.vec([2, 3, 1])])
    assert not la.subspace_contains(u, [la.vec([1, 0, 0])])


def test_intersect():
    u = [la.vec([1, 0, 0]), la.vec([0, 1, 0])]
    v = [la.vec([0, 1, 0]), la.vec([0, 0, 1])]
    assert la.intersect(u, v, 3) == la.span_key([la.vec([0, 1, 0])], 3)


def test_smith_decomposition():
    a = la.mat([[2, 4], [6, 8]])
    d, u, v = la.smith(a)
    assert la.matmul(la.matmul(u, a), v) == d
    assert abs(la.det(u)) == 1 and abs(la.det(v)) == 1


def test_solve_mod_one_counts_fixed_points_of_minus_identity():
    # -x ≡ x (mod Z^2) has the four half-period solutions
    offs, dirs = la.solve_mod_one(la.mat([[2, 0], [0, 2]]), la.vec([0, 0]))
    assert not dirs
    assert sorted(la.mod1(o) for o in offs) == sorted(
        (F(a, 2), F(b, 2)) for a in (0, 1) for b in (0, 1))


def test_primitive_and_content():
    assert la.primitive(la.vec([F(-2, 3), F(4, 3)])) == (1, -2)
    assert la.content([4, 6]) == 2
