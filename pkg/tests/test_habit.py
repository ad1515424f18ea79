import numpy as np
import pytest

from cofactor import linalg3 as la, synth
from cofactor.errors import Degenerate, NoHabitPlane
from cofactor.habit import (
    g_function, habit_solutions, laminate_gram, midplane_solutions, naive_sweep, sweep_habit,
)
from cofactor.twinning import type1_solution

GRID = np.linspace(0.0, 1.0, 101)


def test_midplane_solutions_factorize():
    U = np.diag([0.9, 1.0, 1.1])
    sols = midplane_solutions(U @ U)
    assert len(sols) == 2
    for s in sols:
        G = np.eye(3) + np.outer(s["b"], s["m"])
        np.testing.assert_allclose(G.T @ G, U @ U, atol=1e-12)
        np.testing.assert_allclose(s["R"] @ U, G, atol=1e-12)
        assert la.is_rotation(s["R"], 1e-12)


def test_midplane_rejects():
    with pytest.raises(NoHabitPlane) as exc:
        midplane_solutions(np.diag([0.8, 1.1, 1.3]))
    assert exc.value.residual == pytest.approx(0.1)
    with pytest.raises(Degenerate):
        midplane_solutions(np.eye(3))


def test_identity_stretch_is_degenerate_not_a_crash():
    with pytest.raises(Degenerate):
        midplane_solutions(np.eye(3) * 1.0)


@pytest.mark.parametrize("maker", [synth.type1_system, synth.type2_system, synth.compound_system])
def test_habit_planes_for_every_f(rng, maker):
    for _ in range(5):
        s = maker(rng)
        worst = max(abs(la.sym_eigen(laminate_gram(s.U, s.a, s.n, f)).values[1] - 1.0) for f in GRID)
        assert worst < 1e-9
        for f in (0.0, 0.37, 1.0):
            for h in habit_solutions(s.U, s.a, s.n, f):
                assert h.residual(s.U, s.a, s.n) < 1e-9
                assert la.is_rotation(h.R, 1e-9)
        np.testing.assert_allclose([g_function(s.U, s.a, s.n, f) for f in GRID], 0.0, atol=1e-12)


def _fit_quadratic(s):
    g = np.array([g_function(s.U, s.a, s.n, f) for f in GRID])
    A = np.column_stack([GRID * (GRID - 1.0), np.ones_like(GRID)])
    coef, *_ = np.linalg.lstsq(A, g, rcond=None)
    return g, coef, np.max(np.abs(A @ coef - g))


@pytest.mark.parametrize("maker", [synth.violate_cc1, synth.violate_cc2])
def test_violations_give_symmetric_quadratic(rng, maker):
    for _ in range(5):
        s = maker(rng)
        g, (A, B), resid = _fit_quadratic(s)
        assert resid < 1e-9
        h = 1e-6
        gp0 = (g_function(s.U, s.a, s.n, h) - g_function(s.U, s.a, s.n, -h)) / (2 * h)
        assert A == pytest.approx(-gp0, rel=1e-5, abs=1e-10)
        with pytest.raises(NoHabitPlane):
            habit_solutions(s.U, s.a, s.n, 0.5)


def test_cc3_violation_fails_in_the_interior(rng):
    s = synth.violate_cc3(rng)
    _, _, resid = _fit_quadratic(s)
    assert resid < 1e-9
    habit_solutions(s.U, s.a, s.n, 0.0)
    with pytest.raises(NoHabitPlane):
        habit_solutions(s.U, s.a, s.n, 0.5)


def test_no_habit_plane_carries_g():
    U = np.diag([0.9, 1.02, 1.1])
    sol = type1_solution(U, [1, 1, 1])
    with pytest.raises(NoHabitPlane) as exc:
        habit_solutions(U, sol.a, sol.n, 0.5)
    assert exc.value.g == pytest.approx(g_function(U, sol.a, sol.n, 0.5))


def test_sweep_tracks_families_continuously(rng):
    s = synth.type1_system(rng)
    fam = sweep_habit(s.U, s.a, s.n, GRID)
    for k in (1, -1):
        ms = np.array([h.m for h in fam[k]])
        bs = np.array([h.b for h in fam[k]])
        assert np.max(np.linalg.norm(np.diff(ms, axis=0), axis=1)) < 0.1
        assert np.max(np.linalg.norm(np.diff(bs, axis=0), axis=1)) < 0.1
    # reversed grid -> same families, reversed
    rev = sweep_habit(s.U, s.a, s.n, GRID[::-1])
    for k in (1, -1):
        np.testing.assert_allclose([h.m for h in rev[k]][::-1], [h.m for h in fam[k]], atol=1e-12)
    naive = naive_sweep(s.U, s.a, s.n, GRID)
    assert len(naive[1]) == len(GRID)


def test_double_solution_on_cc3_boundary():
    s = synth.compound_cc3_boundary()
    h = habit_solutions(s.U, s.a, s.n, 0.5)
    assert len(h) == 1 and h[0].double
    assert h[0].lam1 == pytest.approx(1.0, abs=1e-7)
