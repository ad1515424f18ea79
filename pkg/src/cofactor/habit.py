"""Austenite/twinned-martensite interfaces:  R (U + f a (x) n) - I = b (x) m.

``C_f = (U + f n⊗a)(U + f a⊗n)`` is the Gram matrix of the averaged
deformation.  A habit plane exists iff its middle eigenvalue is 1; the two
solutions then follow from the outer eigenpairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg3 as la
from .errors import Degenerate, NoHabitPlane

TOL_MID = 1e-6


@dataclass(frozen=True)
class HabitSolution:
    f: float
    kappa: int
    R: np.ndarray
    b: np.ndarray
    m: np.ndarray
    lam1: float
    lam3: float
    double: bool = False

    def residual(self, U, a, n) -> float:
        F = np.asarray(U) + self.f * np.outer(a, n)
        return float(np.linalg.norm(self.R @ F - la.I3 - np.outer(self.b, self.m)))


def laminate_gram(U, a, n, f) -> np.ndarray:
    U = np.asarray(U, float)
    F = U + f * np.outer(a, n)
    C = F.T @ F
    return 0.5 * (C + C.T)


def g_function(U, a, n, f) -> float:
    return float(np.linalg.det(laminate_gram(U, a, n, f) - la.I3))


def _bm(lam1, lam3, v1, v3, kappa):
    # rho = 1; lam1 <= 1 <= lam3 are square roots of the outer eigenvalues
    p = np.sqrt(max(0.0, 1.0 - lam1 * lam1))
    q = np.sqrt(max(0.0, lam3 * lam3 - 1.0))
    d = np.sqrt(lam3 * lam3 - lam1 * lam1)
    b = (lam3 * p * v1 + kappa * lam1 * q * v3) / d
    m = (lam3 - lam1) / d * (-p * v1 + kappa * q * v3)
    return b, m


def _solutions_from_frame(M, vals, v1, v3, F, tol_mid):
    """Both (kappa, R, b, m) for a given eigen-frame of M; R solves R F = I + b⊗m."""
    mid = vals[1] - 1.0
    if abs(mid) > tol_mid:
        raise NoHabitPlane(f"middle eigenvalue differs from 1 by {mid:.3e}", residual=mid,
                           g=float(np.linalg.det(M - la.I3)))
    if vals[2] - vals[0] <= 1e-12 * max(1.0, vals[2]):
        raise Degenerate("outer eigenvalues coincide")
    lam1 = np.sqrt(min(vals[0], 1.0))
    lam3 = np.sqrt(max(vals[2], 1.0))
    # with lambda2 only approximately 1 the factorization is exact for the
    # matrix whose middle eigenvalue is replaced by 1; allow for that defect
    fac_tol = 1e-8 + 4.0 * abs(mid)
    out = []
    for kappa in (1, -1):
        b, m = _bm(lam1, lam3, v1, v3, kappa)
        G = la.I3 + np.outer(b, m)
        if np.linalg.norm(G.T @ G - M) > fac_tol * max(1.0, np.linalg.norm(M)):
            raise NoHabitPlane("factorization check failed", residual=mid)
        R = la.recover_rotation(G, F, tol=fac_tol * max(1.0, np.linalg.norm(M)))
        out.append((kappa, R, b, m))
    # sqrt(1 - lam1^2) ~ 1e-8 already when lam1 = 1 to rounding, hence the loose threshold
    double = np.linalg.norm(np.outer(out[0][2], out[0][3]) - np.outer(out[1][2], out[1][3])) < 1e-7
    return out, float(lam1), float(lam3), bool(double)


def midplane_solutions(M, tol_mid=TOL_MID):
    """Solutions (R, b, m) of (I + b⊗m)^T (I + b⊗m) = M.

    R is the rotation taking the symmetric square root of M to I + b⊗m.
    Returns a list of dicts with keys kappa, R, b, m (one entry when both
    branches coincide).
    """
    M = la.as_mat3(M, "M")
    M = 0.5 * (M + M.T)
    es = la.sym_eigen(M)
    out, lam1, lam3, double = _solutions_from_frame(
        M, es.values, es.v1, es.v3, la.sqrtm_spd(M), tol_mid)
    sols = [dict(kappa=k, R=R, b=b, m=m, lam1=lam1, lam3=lam3, double=double) for k, R, b, m in out]
    return sols[:1] if double else sols


def _habit_at(U, a, n, f, v1, v3, vals, tol_mid):
    U = np.asarray(U, float)
    F = U + f * np.outer(a, n)
    C = laminate_gram(U, a, n, f)
    try:
        out, lam1, lam3, double = _solutions_from_frame(C, vals, v1, v3, F, tol_mid)
    except NoHabitPlane as exc:
        raise NoHabitPlane(f"no habit plane at f = {f:g}: {exc}", residual=exc.residual,
                           g=g_function(U, a, n, f)) from None
    sols = [HabitSolution(f=float(f), kappa=k, R=R, b=b, m=m, lam1=lam1, lam3=lam3, double=double)
            for k, R, b, m in out]
    return sols[:1] if double else sols


def habit_solutions(U, a, n, f, tol_mid=TOL_MID):
    """Habit solutions at volume fraction ``f`` (two, or one tagged ``double``)."""
    C = laminate_gram(U, a, n, f)
    es = la.sym_eigen(C)
    return _habit_at(U, a, n, f, es.v1, es.v3, es.values, tol_mid)


def sweep_habit(U, a, n, grid, tol_mid=TOL_MID):
    """Two continuously varying families of habit solutions over ``grid``.

    Eigenvectors of C_f are tracked so that v_i(f_k) . v_i(f_{k-1}) > 0.  The
    labels are anchored at the smallest f (deterministic sign convention there),
    so the families do not depend on the order in which ``grid`` is given.
    Returns ``{+1: [...], -1: [...]}`` in the order of ``grid``.
    """
    grid = [float(f) for f in grid]
    order = np.argsort(grid, kind="stable")
    fam = {1: [None] * len(grid), -1: [None] * len(grid)}
    prev1 = prev3 = None
    for idx in order:
        f = grid[idx]
        es = la.sym_eigen(laminate_gram(U, a, n, f))
        v1, v3 = es.v1, es.v3
        if prev1 is not None:
            v1 = v1 if v1 @ prev1 >= 0 else -v1
            v3 = v3 if v3 @ prev3 >= 0 else -v3
        prev1, prev3 = v1, v3
        sols = _habit_at(U, a, n, f, v1, v3, es.values, tol_mid)
        if len(sols) == 1:
            fam[1][idx] = fam[-1][idx] = sols[0]
        else:
            for s in sols:
                fam[s.kappa][idx] = s
    return fam


def naive_sweep(U, a, n, grid, tol_mid=TOL_MID):
    """Per-f labelling with no tracking (each f uses the fixed sign convention)."""
    fam = {1: [], -1: []}
    for f in grid:
        sols = habit_solutions(U, a, n, f, tol_mid)
        for k in (1, -1):
            fam[k].append(next((s for s in sols if s.kappa == k), sols[0]))
    return fam
