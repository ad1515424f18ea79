"""Geometrically linear counterparts: strain compatibility and the linear cofactor conditions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg3 as la
from .errors import DegenerateAxis, NoSolution

CCL_TOL = 1e-10          # synthetic data
CCL_TOL_EXPERIMENTAL = 1e-4


@dataclass(frozen=True)
class Strain:
    E: np.ndarray
    eig: la.EigenSystem

    @classmethod
    def from_matrix(cls, E, tol=1e-12):
        E = la.as_mat3(E, "E")
        if not la.is_symmetric(E, tol):
            raise la.InvalidInput("strain is not symmetric")
        E = 0.5 * (E + E.T)
        return cls(E=E, eig=la.sym_eigen(E))

    @classmethod
    def from_stretch(cls, U):
        return cls.from_matrix(np.asarray(U, float) - la.I3)


def as_strain(E) -> Strain:
    return E if isinstance(E, Strain) else Strain.from_matrix(E)


@dataclass(frozen=True)
class LinTwin:
    a: np.ndarray
    n: np.ndarray
    W: np.ndarray      # skew part: Ê + W - E = a (x) n
    Ehat: np.ndarray


def lin_rank_one(S, tol=CCL_TOL):
    """(a, n) with sym(a (x) n) = S; requires a zero middle eigenvalue."""
    S = as_strain(S)
    s1, s2, s3 = S.eig.values
    if np.max(np.abs(S.eig.values)) <= tol:
        raise NoSolution("zero strain", residual=0.0)
    if abs(s2) > tol:
        raise NoSolution(f"middle eigenvalue is {s2:.3e}, not zero", residual=float(s2))
    p, q = np.sqrt(max(0.0, -s1)), np.sqrt(max(0.0, s3))
    e1, e3 = S.eig.v1, S.eig.v3
    return p * e1 + q * e3, -p * e1 + q * e3


def reflect_strain(E, ehat):
    Q = la.two_fold(ehat)
    E = as_strain(E).E
    return Q @ E @ Q


def lin_twin(E, ehat) -> LinTwin:
    E = as_strain(E).E
    e = la.unit(ehat, "ehat")
    Eh = reflect_strain(E, e)
    if np.linalg.norm(Eh - E) <= 1e-8 * max(np.linalg.norm(E), 1e-300):
        raise DegenerateAxis("ê is an eigenvector of E (Ê = E)")
    Ee = E @ e
    a = 4.0 * ((e @ Ee) * e - Ee)
    W = 0.5 * (np.outer(a, e) - np.outer(e, a))
    return LinTwin(a=a, n=e.copy(), W=W, Ehat=Eh)


@dataclass(frozen=True)
class CCLReport:
    eps: np.ndarray
    n_eig: np.ndarray          # components of ê in the eigenbasis of E
    ccl1: float                # eps2
    rank2: bool
    ccl2: float                # (a.v2)(n.v2)
    ccl3: float                # (tr(E+Ê))^2 - tr((E+Ê)^2)
    ccl2_prime: float          # n2^2 (n1^2 eps1 + n3^2 eps3)
    ccl3_prime: float          # branch value, <= 0 required
    ccl3_branch: int           # 1 when n2 = 0, else 2
    tol: float

    @property
    def satisfied(self) -> bool:
        t = self.tol
        return (abs(self.ccl1) < t and self.rank2 and abs(self.ccl2) < t
                and self.ccl3 <= t and self.ccl3_prime <= t)


def ccl_residuals(E, ehat, tol=CCL_TOL) -> CCLReport:
    S = as_strain(E)
    tw = lin_twin(S, ehat)
    eps = S.eig.values
    V = S.eig.vectors
    nn = V.T @ tw.n
    v2 = V[:, 1]
    rank2 = bool(abs(eps[1]) < tol and eps[0] < -tol and eps[2] > tol)
    Es = S.E + tw.Ehat
    ccl3 = np.trace(Es) ** 2 - np.trace(Es @ Es)
    n1, n2, n3 = nn
    e1, e3 = eps[0], eps[2]
    if abs(n2) <= tol:
        branch, c3p = 1, e1 * e3 + n1**2 * n3**2 * (e3 - e1) ** 2
    else:
        branch, c3p = 2, e1 * e3 + n3**2 * e3 * (e3 - e1)
    return CCLReport(
        eps=eps, n_eig=nn, ccl1=float(eps[1]), rank2=rank2,
        ccl2=float((tw.a @ v2) * (tw.n @ v2)), ccl3=float(ccl3),
        ccl2_prime=float(n2**2 * (n1**2 * e1 + n3**2 * e3)),
        ccl3_prime=float(c3p), ccl3_branch=branch, tol=tol,
    )


def lin_habit(E, ehat, f, tol=CCL_TOL):
    """(b, m) with sym(b (x) m) = f Ê + (1 - f) E."""
    S = as_strain(E)
    Eh = reflect_strain(S, ehat)
    return lin_rank_one(f * Eh + (1.0 - f) * S.E, tol=tol)


def compare_nonlinear_linear(lam3, n, v1=(1.0, 0.0, 0.0), v3=(0.0, 1.0, 0.0)):
    """lambda1 that makes the condition exact for Type I, Type II and the linear theory.

    ``n`` is the unit normal; its components along the eigenvectors ``v1``, ``v3``
    enter the three scalar relations
        (1/l1^2 - 1) n1^2 + (1/l3^2 - 1) n3^2 = 0     nonlinear, Type I
        (l1^2 - 1) n1^2 + (l3^2 - 1) n3^2 = 0         nonlinear, Type II
        (l1 - 1) n1^2 + (l3 - 1) n3^2 = 0             linear
    """
    lam3 = float(lam3)
    if lam3 <= 1.0:
        raise NoSolution("lambda3 must exceed 1")
    n = la.unit(n, "n")
    n1, n3 = float(n @ la.unit(v1)), float(n @ la.unit(v3))
    if n1 * n1 < 1e-300:
        raise NoSolution("n has no component along v1", residual=float(n3 * n3 * (lam3 - 1.0)))
    r = n3 * n3 / (n1 * n1)
    inv_sq = 1.0 - (1.0 / lam3**2 - 1.0) * r     # 1 / l1^2
    sq = 1.0 - (lam3**2 - 1.0) * r               # l1^2
    lin = 1.0 - (lam3 - 1.0) * r
    out = []
    for name, val in (("Type I", inv_sq ** -0.5 if inv_sq > 0 else np.nan),
                      ("Type II", np.sqrt(sq) if sq > 0 else np.nan),
                      ("linear", lin)):
        if not (0.0 < val <= 1.0) or np.isnan(val):
            raise NoSolution(f"{name}: no lambda1 in (0, 1)")
        out.append(float(val))
    return tuple(out)
