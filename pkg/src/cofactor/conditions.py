"""Cofactor condition residuals and the verdicts derived from them.

CC1   lambda2(U) = 1
CC2   a . U cof(U^2 - I) n = 0            (equivalently (a.v2)(n.v2) = 0)
CC3   tr U^2 - det U^2 - |a|^2 |n|^2 / 4 - 2 >= 0

For Type I/II axes CC2 reduces to |U^-1 ê| = 1 (Type I) or |U ê| = 1 (Type II).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg3 as la
from .errors import AmbiguousMiddleEigenvector, NotCompound
from .twinning import (
    DomainPair,
    as_stretch,
    classify_domain,
    compound_solutions,
    perpendicular_eigenvector,
    type1_solution,
    type2_solution,
)

DEFAULT_TOL = 1e-4
GAP_TOL = 1e-8


def default_tol() -> float:
    """Verdict tolerance; the COFACTOR_TOL environment variable overrides it."""
    env = os.environ.get("COFACTOR_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            pass
    return DEFAULT_TOL


@dataclass(frozen=True)
class CCResiduals:
    cc1: float
    cc2: float
    cc3: float


def cc_residuals(U, a, n) -> CCResiduals:
    st = as_stretch(U)
    U = st.U
    a, n = np.asarray(a, float), np.asarray(n, float)
    U2 = U @ U
    cc1 = st.values[1] - 1.0
    cc2 = a @ U @ la.cofactor_matrix(U2 - la.I3) @ n
    cc3 = np.trace(U2) - np.linalg.det(U2) - (a @ a) * (n @ n) / 4.0 - 2.0
    return CCResiduals(float(cc1), float(cc2), float(cc3))


def cc2_prime(U, a, n):
    """The two factors (a . v2, n . v2)."""
    st = as_stretch(U)
    vals = st.values
    gap = min(vals[1] - vals[0], vals[2] - vals[1])
    if gap <= GAP_TOL * max(1.0, abs(vals).max()):
        raise AmbiguousMiddleEigenvector(f"middle eigenvalue is repeated (gap {gap:.2e})")
    v2 = st.eig.v2
    return float(np.asarray(a) @ v2), float(np.asarray(n) @ v2)


def check_type1(U, ehat) -> float:
    e = la.unit(ehat)
    return float(np.linalg.norm(np.linalg.solve(as_stretch(U).U, e)) - 1.0)


def check_type2(U, ehat) -> float:
    e = la.unit(ehat)
    return float(np.linalg.norm(as_stretch(U).U @ e) - 1.0)


@dataclass(frozen=True)
class CompoundVerdict:
    e1: np.ndarray
    e2: np.ndarray
    cc1: float
    e1_dot_v2: float
    e2_dot_v2: float
    e1_cross_v1: float   # |ê1 x v1|, zero iff parallel
    e1_cross_v3: float
    cc3: tuple           # (solution with n = ê1, solution with n = ê2)
    tol: float

    @property
    def geometric(self) -> bool:
        """All conditions except lambda2 = 1."""
        t = self.tol
        return (abs(self.e1_dot_v2) < t and abs(self.e2_dot_v2) < t and self.e1_cross_v1 > t
                and self.e1_cross_v3 > t and min(self.cc3) >= -t)

    @property
    def satisfied(self) -> bool:
        return self.geometric and abs(self.cc1) < self.tol


def check_compound(U, ehat1, tol=None) -> CompoundVerdict:
    tol = default_tol() if tol is None else tol
    st = as_stretch(U)
    e1 = la.unit(ehat1)
    if perpendicular_eigenvector(st, e1) is None:
        raise NotCompound("ê₁ is not perpendicular to any eigenvector of U")
    e2, s1, s2 = compound_solutions(st, e1)
    V = st.eig.vectors
    return CompoundVerdict(
        e1=e1, e2=e2, cc1=float(st.values[1] - 1.0),
        e1_dot_v2=float(e1 @ V[:, 1]), e2_dot_v2=float(e2 @ V[:, 1]),
        e1_cross_v1=float(np.linalg.norm(np.cross(e1, V[:, 0]))),
        e1_cross_v3=float(np.linalg.norm(np.cross(e1, V[:, 2]))),
        cc3=(cc_residuals(st, s1.a, s1.n).cc3, cc_residuals(st, s2.a, s2.n).cc3),
        tol=tol,
    )


def force_middle_eigenvalue(U, value=1.0) -> np.ndarray:
    """U with its middle eigenvalue replaced by ``value`` (same eigenvectors)."""
    es = as_stretch(U).eig
    vals = es.values.copy()
    vals[1] = value
    V = es.vectors
    return V @ np.diag(vals) @ V.T


@dataclass(frozen=True)
class CofactorReport:
    """Raw residuals for one (U, ê) plus verdicts at ``tol``.

    The pairs ``cc2``, ``cc2_prime`` and ``cc3`` hold (Type I, Type II) values for a
    Type I/II axis and (n = ê1, n = ê2) values for a compound axis.
    """

    ehat: np.ndarray
    kind: DomainPair
    tol: float
    cc1: float
    cc2: tuple                 # (first solution, second solution)
    cc2_prime: tuple           # ((a.v2, n.v2) first, (a.v2, n.v2) second) or None
    cc3: tuple
    cc3_type12: tuple          # cc3 of the Type I and Type II formula solutions
    typeI_residual: float      # |U^-1 ê| - 1
    typeII_residual: float     # |U ê| - 1
    typeI_residual_sq: float   # |U^-1 ê|^2 - 1
    typeII_residual_sq: float  # |U ê|^2 - 1
    compound: CompoundVerdict | None = None
    verdicts: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        v = self.verdicts
        hits = [k for k in ("Type I", "Type II", "Compound") if v.get(k)]
        if hits:
            return "satisfied (" + ", ".join(hits) + ")"
        if v.get("Compound if lambda2 = 1"):
            return "satisfied if lambda2 = 1"
        return "not satisfied"

    @property
    def satisfied(self) -> bool:
        return self.verdict.startswith("satisfied (")

    def as_dict(self) -> dict:
        def conv(x):
            if isinstance(x, np.ndarray):
                return x.tolist()
            if isinstance(x, tuple):
                return [conv(y) for y in x]
            if isinstance(x, (np.floating, np.integer)):
                return x.item()
            return x

        d = {k: conv(getattr(self, k)) for k in (
            "ehat", "tol", "cc1", "cc2", "cc2_prime", "cc3", "cc3_type12", "typeI_residual",
            "typeII_residual", "typeI_residual_sq", "typeII_residual_sq")}
        d["kind"] = self.kind.value
        d["verdicts"] = dict(self.verdicts)
        d["verdict"] = self.verdict
        if self.compound is not None:
            c = self.compound
            d["compound"] = {
                "e1": conv(c.e1), "e2": conv(c.e2), "e1_dot_v2": c.e1_dot_v2,
                "e2_dot_v2": c.e2_dot_v2, "e1_cross_v1": c.e1_cross_v1,
                "e1_cross_v3": c.e1_cross_v3, "cc3": conv(c.cc3),
            }
        return d


def _type12_verdicts(cc1, t1, t2, cc3_12, tol):
    ok1 = abs(cc1) < tol
    return {
        "Type I": bool(ok1 and abs(t1) < tol and cc3_12[0] >= -tol),
        "Type II": bool(ok1 and abs(t2) < tol and cc3_12[1] >= -tol),
    }


def cofactor_report(U, ehat, tol=None) -> CofactorReport:
    """Classify the axis, evaluate every applicable condition, and derive verdicts.

    The Type I/II formulas are valid for any non-degenerate axis (for compound
    axes their diads coincide with the compound ones), so the Type I/II
    verdicts are always reported; compound axes additionally get the
    compound criteria.
    """
    tol = default_tol() if tol is None else tol
    st = as_stretch(U)
    e = la.canonical_axis(ehat)
    kind = classify_domain(st, e)
    t1s, t2s = type1_solution(st, e), type2_solution(st, e)
    if kind is DomainPair.COMPOUND:
        _, s1, s2 = compound_solutions(st, e)
    else:
        s1, s2 = t1s, t2s
    r1, r2 = cc_residuals(st, s1.a, s1.n), cc_residuals(st, s2.a, s2.n)
    cc3_12 = (cc_residuals(st, t1s.a, t1s.n).cc3, cc_residuals(st, t2s.a, t2s.n).cc3)
    try:
        primes = (cc2_prime(st, s1.a, s1.n), cc2_prime(st, s2.a, s2.n))
    except AmbiguousMiddleEigenvector:
        primes = None
    Uie = np.linalg.solve(st.U, e)
    Ue = st.U @ e
    t1, t2 = float(np.linalg.norm(Uie) - 1.0), float(np.linalg.norm(Ue) - 1.0)
    verdicts = _type12_verdicts(r1.cc1, t1, t2, cc3_12, tol)
    comp = None
    if kind is DomainPair.COMPOUND:
        comp = check_compound(st, e, tol)
        verdicts["Compound"] = comp.satisfied
        verdicts["Compound if lambda2 = 1"] = comp.geometric
    return CofactorReport(
        ehat=e, kind=kind, tol=tol, cc1=r1.cc1, cc2=(r1.cc2, r2.cc2), cc2_prime=primes,
        cc3=(r1.cc3, r2.cc3), cc3_type12=cc3_12, typeI_residual=t1, typeII_residual=t2,
        typeI_residual_sq=float(Uie @ Uie - 1.0), typeII_residual_sq=float(Ue @ Ue - 1.0),
        compound=comp, verdicts=verdicts,
    )


def with_tolerance(report: CofactorReport, tol: float) -> CofactorReport:
    """Re-derive only the verdicts at another tolerance (residuals are unchanged)."""
    v = _type12_verdicts(report.cc1, report.typeI_residual, report.typeII_residual,
                         report.cc3_type12, tol)
    comp = report.compound
    if comp is not None:
        comp = replace(comp, tol=tol)
        v["Compound"] = comp.satisfied
        v["Compound if lambda2 = 1"] = comp.geometric
    return replace(report, tol=tol, verdicts=v, compound=comp)
