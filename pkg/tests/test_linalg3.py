import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cofactor import linalg3 as la
from cofactor.errors import InvalidInput, NotCompatible

from conftest import random_spd

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def test_as_mat3_rejects_bad_shapes_and_nan():
    with pytest.raises(InvalidInput):
        la.as_mat3(np.zeros((2, 3)))
    with pytest.raises(InvalidInput):
        la.as_mat3([[np.nan, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(InvalidInput):
        la.unit([0, 0, 0])


def test_canonical_axis():
    np.testing.assert_allclose(la.canonical_axis([0, -1, 1]), np.array([0, 1, -1]) / np.sqrt(2))
    e = la.canonical_axis([-1, 2, 0])
    assert e[0] > 0
    np.testing.assert_allclose(np.linalg.norm(e), 1.0)


@settings(max_examples=200, deadline=None)
@given(arrays(float, (3, 3), elements=finite))
def test_sym_eigen_frame(A):
    S = A + A.T
    es = la.sym_eigen(S)
    assert np.all(np.diff(es.values) >= 0)
    V = es.vectors
    np.testing.assert_allclose(V.T @ V, np.eye(3), atol=1e-12)
    assert np.linalg.det(V) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(es.reconstruct(), S, atol=1e-11 * max(1.0, np.abs(S).max()))


def test_sym_eigen_sign_convention():
    es = la.sym_eigen(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(es.values, [1, 2, 3])
    np.testing.assert_allclose(es.v1, [0, 1, 0])
    np.testing.assert_allclose(es.v3, [1, 0, 0])
    np.testing.assert_allclose(es.v2, np.cross(es.v3, es.v1))
    # same answer whatever the sign LAPACK hands back
    Q = np.diag([-1.0, 1.0, -1.0])
    es2 = la.sym_eigen(Q @ np.diag([3.0, 1.0, 2.0]) @ Q)
    np.testing.assert_allclose(es2.vectors, es.vectors)


def test_sym_eigen_repeated_eigenvalues():
    es = la.sym_eigen(np.diag([1.0, 1.0, 2.0]))
    np.testing.assert_allclose(es.values, [1, 1, 2])
    np.testing.assert_allclose(es.vectors.T @ es.vectors, np.eye(3), atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(arrays(float, (3, 3), elements=finite))
def test_cofactor_identity(A):
    C = la.cofactor_matrix(A)
    np.testing.assert_allclose(A.T @ C, np.linalg.det(A) * np.eye(3), atol=1e-9)


def test_cofactor_of_diagonal():
    np.testing.assert_allclose(la.cofactor_matrix(np.diag([2.0, 3.0, 5.0])), np.diag([15.0, 10.0, 6.0]))


def test_two_fold():
    Q = la.two_fold([1, 1, 0])
    assert la.is_rotation(Q)
    np.testing.assert_allclose(Q @ [1, 1, 0], [1, 1, 0])
    np.testing.assert_allclose(Q @ [0, 0, 1], [0, 0, -1])
    np.testing.assert_allclose(Q @ Q, np.eye(3), atol=1e-15)


def test_nearest_rotation_and_recover(rng):
    from scipy.spatial.transform import Rotation

    R = Rotation.random(random_state=3).as_matrix()
    U = random_spd(rng)
    np.testing.assert_allclose(la.recover_rotation(R @ U, U), R, atol=1e-12)
    noisy = R + 1e-3 * rng.normal(size=(3, 3))
    assert la.is_rotation(la.nearest_rotation(noisy))
    with pytest.raises(NotCompatible):
        la.recover_rotation(U, np.eye(3))
    with pytest.raises(NotCompatible):
        la.recover_rotation(-np.eye(3), np.eye(3))


def test_sqrtm_and_angle_axis(rng):
    U = random_spd(rng)
    np.testing.assert_allclose(la.sqrtm_spd(U @ U), U, atol=1e-12)
    with pytest.raises(InvalidInput):
        la.sqrtm_spd(-np.eye(3))
    ang, ax = la.angle_axis(la.two_fold([0, -1, 1]))
    assert ang == pytest.approx(np.pi)
    np.testing.assert_allclose(ax, la.canonical_axis([0, -1, 1]), atol=1e-12)
    ang, _ = la.angle_axis(np.eye(3))
    assert ang == 0.0
