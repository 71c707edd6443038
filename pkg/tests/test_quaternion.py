from fractions import Fraction as F

import pytest

from kummer_assoc import crystallographic as cr
from kummer_assoc import linalg as la
from kummer_assoc import quaternion as qa


def e(a):
    return qa.basis7(a)


def test_hamilton_relations():
    I, J, K = qa.I, qa.J, qa.K
    minus_one = qa.Quat(-1, 0, 0, 0)
    assert I * I == J * J == K * K == minus_one
    assert I * J == K and J * K == I and K * I == J
    assert I * J * K == minus_one


def test_imaginary_product_is_bracket_plus_dot():
    u, v = qa.ImVec(1, 2, 3), qa.ImVec(-1, 0, 2)
    prod = u.quat() * v.quat()
    assert prod.as_tuple()[0] == -u.dot(v)


def test_phi0_normal_form_and_metric():
    phi = qa.PHI0.phi
    assert phi.c[(0, 1, 2)] == 1 and phi.c[(0, 3, 4)] == -1
    for a in range(7):
        for b in range(7):
            assert qa.PHI0.metric(e(a), e(b)) == int(a == b)


def test_associator_vanishes_on_associative_plane():
    assert qa.associator(e(0), e(1), e(2)) == (0,) * 7
    u, w = la.vec([1, 2, 0, 0, 1, 0, 3]), la.vec([0, 1, 1, 0, 0, 2, 0])
    assert qa.associator(u, u, w) == (0,) * 7


def test_cross_product_norm():
    u, v = la.vec([1, 0, 2, 0, 0, 1, 0]), la.vec([0, 3, 0, 1, 0, 0, 1])
    c = qa.cross(u, v)
    assert la.dot(c, c) == la.dot(u, u) * la.dot(v, v) - la.dot(u, v) ** 2


def test_lambda_plus_of_involutions():
    # q -> a q conj(b): -iqi has a = b = -i, iqi has a = i, b = -i, jqj has a = j, b = -j
    mi, mj = qa.Quat(0, -1, 0, 0), qa.Quat(0, 0, -1, 0)
    assert qa.lambda_plus(qa.quat_rotation(mi, mi)).m == cr.R2
    assert qa.lambda_plus(qa.quat_rotation(qa.I, mi)).m == cr.RPLUS
    assert qa.lambda_plus(qa.quat_rotation(qa.J, mj)).m == cr.RMINUS


def test_lambda_plus_rejects_orientation_reversal():
    refl = qa.Rotation(((-1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
    with pytest.raises(ValueError):
        qa.lambda_plus(refl)


def test_rotation_must_be_orthogonal():
    with pytest.raises(ValueError):
        qa.Rotation(((1, 1), (0, 1)))


def test_unit_from_is_unit():
    q = qa.unit_from(qa.Quat(1, 2, F(1, 3), -1))
    assert q.norm2() == 1
