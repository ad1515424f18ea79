import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cofactor import linalg3 as la
from cofactor.errors import DegenerateAxis, NoSolution
from cofactor.linearized import (
    Strain, ccl_residuals, compare_nonlinear_linear, lin_habit, lin_rank_one, lin_twin, reflect_strain,
)

from conftest import random_unit


def sym(a, n):
    return 0.5 * (np.outer(a, n) + np.outer(n, a))


def test_rank_one_example():
    S = np.diag([-0.01, 0.0, 0.04])
    a, n = lin_rank_one(S)
    np.testing.assert_allclose(a, [0.1, 0, 0.2])
    np.testing.assert_allclose(n, [-0.1, 0, 0.2])
    np.testing.assert_allclose(sym(a, n), S, atol=1e-12)


def test_rank_one_failures():
    with pytest.raises(NoSolution, match="zero strain"):
        lin_rank_one(np.zeros((3, 3)))
    with pytest.raises(NoSolution) as exc:
        lin_rank_one(np.diag([-0.01, 1e-3, 0.04]))
    assert exc.value.residual == pytest.approx(1e-3)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_lin_twin_identities(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(scale=0.05, size=(3, 3))
    E = A + A.T
    e = random_unit(rng)
    tw = lin_twin(E, e)
    np.testing.assert_allclose(tw.Ehat - E, sym(tw.a, tw.n), atol=1e-12)
    np.testing.assert_allclose(tw.Ehat + tw.W - E, np.outer(tw.a, tw.n), atol=1e-12)
    np.testing.assert_allclose(tw.W, -tw.W.T, atol=1e-14)
    assert abs(tw.a @ tw.n) < 1e-10
    # the rank-one solver finds the same diad up to swap and scaling
    a2, n2 = lin_rank_one(tw.Ehat - E)
    np.testing.assert_allclose(sym(a2, n2), sym(tw.a, tw.n), atol=1e-12)


def test_lin_twin_degenerate():
    with pytest.raises(DegenerateAxis):
        lin_twin(np.diag([-0.08, 0.0, 0.08]), [1, 0, 0])


def test_ccl_worked_axis():
    E = np.diag([-0.08, 0.0, 0.08])
    r = ccl_residuals(E, np.ones(3) / np.sqrt(3))
    assert r.rank2 and abs(r.ccl1) < 1e-14
    n1, n2, n3 = r.n_eig
    assert n1**2 * r.eps[0] + n3**2 * r.eps[2] == pytest.approx(0.0, abs=1e-15)
    assert r.ccl3_branch == 2
    assert r.ccl3_prime == pytest.approx(r.eps[0] * r.eps[2] + n3**2 * r.eps[2] * (r.eps[2] - r.eps[0]))
    assert r.satisfied
    # the (1,1,0) axis is not on the cone for this strain
    r110 = ccl_residuals(E, [1, 1, 0])
    n1, _, n3 = r110.n_eig
    assert n1**2 * r110.eps[0] + n3**2 * r110.eps[2] == pytest.approx(-0.04)


def test_ccl_rank_one_strain_fails():
    g = np.array([0.1, 0.2, 0.05])
    r = ccl_residuals(np.outer(g, g), [1, 0, 1])
    assert abs(r.ccl1) < 1e-12
    assert not r.rank2 and not r.satisfied


def test_ccl_reports_eps2():
    r = ccl_residuals(np.diag([-0.05, 0.002, 0.06]), [1, 1, 1])
    assert r.ccl1 == pytest.approx(0.002)
    assert not r.satisfied


def _ccl_system(rng):
    e1 = -rng.uniform(0.01, 0.1)
    e3 = rng.uniform(0.01, 0.1)
    n2 = rng.uniform(0.2, 0.8)
    r2 = 1 - n2**2
    n1 = np.sqrt(r2 * e3 / (e3 - e1))
    n3 = np.sqrt(r2 * -e1 / (e3 - e1))
    Q = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    return Q @ np.diag([e1, 0.0, e3]) @ Q.T, Q @ np.array([n1, n2, n3])


def test_linear_habit_for_every_f(rng):
    for _ in range(20):
        E, e = _ccl_system(rng)
        rep = ccl_residuals(E, e)
        assert abs(rep.ccl2_prime) < 1e-12
        Eh = reflect_strain(E, e)
        worst = max(abs(np.linalg.eigvalsh(f * Eh + (1 - f) * E)[1]) for f in np.linspace(0, 1, 101))
        assert worst < 1e-12
        b, m = lin_habit(E, e, 0.3)
        np.testing.assert_allclose(sym(b, m), 0.3 * Eh + 0.7 * E, atol=1e-12)


def test_endpoint_solutions_share_a_vector(rng):
    E, e = _ccl_system(rng)
    b0, m0 = lin_habit(E, e, 0.0)
    b1, m1 = lin_habit(E, e, 1.0)
    vecs0, vecs1 = (b0, m0), (b1, m1)
    par = min(np.linalg.norm(np.cross(u / np.linalg.norm(u), v / np.linalg.norm(v)))
              for u in vecs0 for v in vecs1)
    assert par < 1e-7


def test_linearization_is_first_order():
    E0 = np.array([[0.3, 0.1, 0.0], [0.1, -0.2, 0.05], [0.0, 0.05, 0.1]])
    e = np.array([1.0, 2.0, 2.0]) / 3.0
    errs = []
    for eps in (1e-2, 1e-3, 1e-4):
        U = np.eye(3) + eps * E0
        nonlin = np.linalg.norm(np.linalg.solve(U, e)) - 1.0
        errs.append(abs(nonlin + eps * e @ E0 @ e))
    rates = np.log10(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.9)


def test_compare_nonlinear_linear():
    t1, t2, lin = compare_nonlinear_linear(1.08, [1, 1, 0])
    # closed form: 1/l1^2 = 2 - 1/l3^2
    assert t1 == pytest.approx((2 - 1.08**-2) ** -0.5, abs=1e-15)
    assert t1 == pytest.approx(0.9355, abs=1e-4)
    assert t2 == pytest.approx(0.913, abs=5e-4)
    assert lin == pytest.approx(0.920, abs=5e-4)
    near = compare_nonlinear_linear(1.0 + 1e-9, [1, 1, 0])
    np.testing.assert_allclose(near, 1.0, atol=1e-8)
    with pytest.raises(NoSolution):
        compare_nonlinear_linear(1.08, [0, 0, 1])
    with pytest.raises(NoSolution):
        compare_nonlinear_linear(1.5, [1, 1, 0])   # Type II needs lambda1^2 < 0


def test_strain_from_stretch():
    S = Strain.from_stretch(np.diag([0.9, 1.0, 1.1]))
    np.testing.assert_allclose(S.eig.values, [-0.1, 0.0, 0.1], atol=1e-15)
