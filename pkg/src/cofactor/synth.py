"""Construct stretch tensors that satisfy (or deliberately violate) the cofactor conditions.

Used by the tests and handy for exploring the scene builders without
experimental data.  All constructors take a ``numpy.random.Generator``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .conditions import cc_residuals
from .twinning import DomainSolution, compound_solutions, type1_solution, type2_solution


@dataclass(frozen=True)
class SynthSystem:
    U: np.ndarray
    ehat: np.ndarray
    solution: DomainSolution
    lam: np.ndarray
    frame: np.ndarray

    @property
    def a(self):
        return self.solution.a

    @property
    def n(self):
        return self.solution.n


def random_rotation(rng) -> np.ndarray:
    return Rotation.random(random_state=int(rng.integers(2**31))).as_matrix()


def _frame(rng, rotate):
    return random_rotation(rng) if rotate else np.eye(3)


def _stretch(lam, V):
    return V @ np.diag(lam) @ V.T


def _axis_on_cone(rng, w1, w3, e2):
    """Unit (c1, e2, c3) in eigen-coordinates with w1 c1^2 = w3 c3^2."""
    r2 = 1.0 - e2 * e2
    # c1^2 + c3^2 = r2 and w1 c1^2 = w3 c3^2
    c1 = np.sqrt(r2 * w3 / (w1 + w3))
    c3 = np.sqrt(r2 * w1 / (w1 + w3))
    s1, s3 = rng.choice([-1.0, 1.0], size=2)
    return np.array([s1 * c1, e2, s3 * c3])


def type1_system(rng, lam1_range=(0.85, 0.97), lam3_range=(1.03, 1.15), rotate=True,
                 require_cc3=True, max_tries=200) -> SynthSystem:
    """lambda2 = 1 and |U^-1 ê| = 1 exactly; ê not perpendicular to an eigenvector."""
    for _ in range(max_tries):
        lam = np.array([rng.uniform(*lam1_range), 1.0, rng.uniform(*lam3_range)])
        e2 = rng.uniform(0.2, 0.9) * rng.choice([-1.0, 1.0])
        c = _axis_on_cone(rng, 1.0 / lam[0] ** 2 - 1.0, 1.0 - 1.0 / lam[2] ** 2, e2)
        V = _frame(rng, rotate)
        U, e = _stretch(lam, V), V @ c
        sol = type1_solution(U, e)
        if not require_cc3 or cc_residuals(U, sol.a, sol.n).cc3 > 1e-6:
            return SynthSystem(U, e, sol, lam, V)
    raise RuntimeError("could not synthesize a Type I system with cc3 > 0")


def type2_system(rng, lam1_range=(0.85, 0.97), lam3_range=(1.03, 1.15), rotate=True,
                 require_cc3=True, max_tries=200) -> SynthSystem:
    """lambda2 = 1 and |U ê| = 1 exactly."""
    for _ in range(max_tries):
        lam = np.array([rng.uniform(*lam1_range), 1.0, rng.uniform(*lam3_range)])
        e2 = rng.uniform(0.2, 0.9) * rng.choice([-1.0, 1.0])
        c = _axis_on_cone(rng, 1.0 - lam[0] ** 2, lam[2] ** 2 - 1.0, e2)
        V = _frame(rng, rotate)
        U, e = _stretch(lam, V), V @ c
        sol = type2_solution(U, e)
        if not require_cc3 or cc_residuals(U, sol.a, sol.n).cc3 > 1e-6:
            return SynthSystem(U, e, sol, lam, V)
    raise RuntimeError("could not synthesize a Type II system with cc3 > 0")


def compound_system(rng, lam1_range=(0.85, 0.97), lam3_range=(1.03, 1.15), rotate=True,
                    which=1, require_cc3=True, max_tries=200) -> SynthSystem:
    """lambda2 = 1 with ê1 in the v1-v3 plane (so ê1, ê2 are both perpendicular to v2)."""
    for _ in range(max_tries):
        lam = np.array([rng.uniform(*lam1_range), 1.0, rng.uniform(*lam3_range)])
        th = rng.uniform(0.15, np.pi / 2 - 0.15)
        c = np.array([np.cos(th), 0.0, np.sin(th)])
        V = _frame(rng, rotate)
        U, e = _stretch(lam, V), V @ c
        _, s1, s2 = compound_solutions(U, e)
        sol = s1 if which == 1 else s2
        if not require_cc3 or cc_residuals(U, sol.a, sol.n).cc3 > 1e-6:
            return SynthSystem(U, e, sol, lam, V)
    raise RuntimeError("could not synthesize a compound system with cc3 > 0")


def violate_cc2(rng, rotate=True, offset=(0.03, 0.15)) -> SynthSystem:
    """lambda2 = 1 but |U^-1 ê| != 1 (Type I solution, CC2 violated only)."""
    lam = np.array([rng.uniform(0.85, 0.97), 1.0, rng.uniform(1.03, 1.15)])
    e2 = rng.uniform(0.2, 0.9)
    w1, w3 = 1.0 / lam[0] ** 2 - 1.0, 1.0 - 1.0 / lam[2] ** 2
    c = _axis_on_cone(rng, w1, w3, e2)
    # tilt the axis off the cone inside the v1-v3 plane
    ang = rng.uniform(*offset) * rng.choice([-1.0, 1.0])
    ca, sa = np.cos(ang), np.sin(ang)
    c = np.array([ca * c[0] - sa * c[2], c[1], sa * c[0] + ca * c[2]])
    V = _frame(rng, rotate)
    U, e = _stretch(lam, V), V @ c
    return SynthSystem(U, e, type1_solution(U, e), lam, V)


def violate_cc1(rng, rotate=True, delta=(0.005, 0.03)) -> SynthSystem:
    """Type I axis of the lambda2 = 1 tensor, then lambda2 shifted away from 1."""
    base = type1_system(rng, rotate=rotate)
    lam = base.lam.copy()
    lam[1] += rng.uniform(*delta) * rng.choice([-1.0, 1.0])
    U = _stretch(lam, base.frame)
    return SynthSystem(U, base.ehat, type1_solution(U, base.ehat), lam, base.frame)


def violate_cc3(rng, rotate=True, max_tries=2000) -> SynthSystem:
    """CC1 and CC2 exact but cc3 < 0.

    Only compound axes can do this: for Type I/II axes the first two conditions
    force cc3 >= 0.  Strong distortion (lambda3 well above 1) and an axis close
    to the bisector of v1, v3 give negative values.
    """
    for _ in range(max_tries):
        lam = np.array([rng.uniform(0.9, 0.99), 1.0, rng.uniform(1.5, 2.0)])
        th = rng.uniform(0.5, 1.1)
        c = np.array([np.cos(th), 0.0, np.sin(th)])
        V = _frame(rng, rotate)
        U, e = _stretch(lam, V), V @ c
        _, s1, s2 = compound_solutions(U, e)
        for sol in (s1, s2):
            if cc_residuals(U, sol.a, sol.n).cc3 < -1e-2:
                return SynthSystem(U, e, sol, lam, V)
    raise RuntimeError("could not synthesize a cc3-violating system")


def compound_cc3_boundary(lam1=0.95, lam3=1.6, which=1) -> SynthSystem:
    """Compound system (no rotation) with cc3 = 0 to rounding, found by root bracketing in the axis angle."""
    from scipy.optimize import brentq

    lam = np.array([lam1, 1.0, lam3])
    U = np.diag(lam)

    def cc3(th):
        _, s1, s2 = compound_solutions(U, [np.cos(th), 0.0, np.sin(th)])
        s = s1 if which == 1 else s2
        return cc_residuals(U, s.a, s.n).cc3

    ths = np.linspace(0.05, np.pi / 2 - 0.05, 400)
    vals = [cc3(t) for t in ths]
    for t0, t1, g0, g1 in zip(ths[:-1], ths[1:], vals[:-1], vals[1:]):
        if g0 * g1 < 0:
            th = brentq(cc3, t0, t1, xtol=1e-15, rtol=1e-15)
            e = np.array([np.cos(th), 0.0, np.sin(th)])
            _, s1, s2 = compound_solutions(U, e)
            return SynthSystem(U, e, s1 if which == 1 else s2, lam, np.eye(3))
    raise RuntimeError("no cc3 sign change for these eigenvalues")
