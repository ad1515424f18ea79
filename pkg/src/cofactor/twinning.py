"""Solutions of the variant-variant compatibility equation  R̂ Û - U = a (x) n.

Forward direction: given U and a two-fold axis ê, produce the Type I / Type II
pair or, when ê is perpendicular to an eigenvector of U, the two compound
solutions.  Inverse direction (``recover_axes``): given two stretch tensors
related by some 180 degree rotation, recover all such axes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg3 as la
from .errors import (
    DegenerateAxis,
    InconsistentInput,
    InvalidInput,
    NotCompatible,
    NotCompound,
    NotSimilar,
)

DEGENERACY_TOL = 1e-8   # relative: ||Û - U|| <= tol * ||U|| means ê leaves U fixed
PERP_TOL = 1e-8         # ê . v = 0 test for the compound criterion


class DomainKind(str, enum.Enum):
    TYPE_I = "Type I"
    TYPE_II = "Type II"
    COMPOUND_1 = "Compound-1"
    COMPOUND_2 = "Compound-2"


class DomainPair(str, enum.Enum):
    """What a two-fold axis produces: a Type I/II pair or a compound pair."""

    TYPE_I_II = "Type I/II"
    COMPOUND = "Compound"


@dataclass(frozen=True)
class StretchTensor:
    U: np.ndarray
    eig: la.EigenSystem = field(repr=False)

    @classmethod
    def from_matrix(cls, U, tol=1e-10):
        U = la.as_mat3(U, "U")
        if not la.is_symmetric(U, tol):
            raise InvalidInput("U is not symmetric")
        U = 0.5 * (U + U.T)
        es = la.sym_eigen(U)
        if es.values[0] <= 0:
            raise InvalidInput("U is not positive-definite")
        return cls(U=U, eig=es)

    @property
    def values(self):
        return self.eig.values


def as_stretch(U) -> StretchTensor:
    return U if isinstance(U, StretchTensor) else StretchTensor.from_matrix(U)


@dataclass(frozen=True)
class DomainSolution:
    ehat: np.ndarray
    kind: DomainKind
    a: np.ndarray
    n: np.ndarray
    Rhat: np.ndarray
    Uhat: np.ndarray
    U: np.ndarray = field(repr=False)

    @property
    def diad(self):
        return np.outer(self.a, self.n)

    def residuals(self) -> dict:
        """The three identities every solution must satisfy (all should be ~0)."""
        U, a, n = self.U, self.a, self.n
        return {
            "twin_equation": float(np.linalg.norm(self.Rhat @ self.Uhat - U - np.outer(a, n))),
            "det_identity": float(n @ np.linalg.solve(U, a)),
            "trace_identity": float(2.0 * n @ U @ a + (a @ a) * (n @ n)),
        }


def reflect_variant(U, ehat) -> np.ndarray:
    """Û = Q U Q with Q the 180 degree rotation about ê."""
    U = as_stretch(U).U
    Q = la.two_fold(ehat)
    Uh = Q @ U @ Q
    return 0.5 * (Uh + Uh.T)


def _check_not_degenerate(U, Uh):
    if np.linalg.norm(Uh - U) <= DEGENERACY_TOL * np.linalg.norm(U):
        raise DegenerateAxis("the two-fold axis leaves U invariant (Û = U)")


def _finish(U, e, kind, a, n, Uh) -> DomainSolution:
    Rhat = la.recover_rotation(U + np.outer(a, n), Uh)
    return DomainSolution(ehat=e, kind=kind, a=a, n=n, Rhat=Rhat, Uhat=Uh, U=U)


def type1_solution(U, ehat) -> DomainSolution:
    st = as_stretch(U)
    U = st.U
    e = la.unit(ehat, "ehat")
    Uh = reflect_variant(st, e)
    _check_not_degenerate(U, Uh)
    Uie = np.linalg.solve(U, e)
    a = 2.0 * (Uie / (Uie @ Uie) - U @ e)
    return _finish(U, e, DomainKind.TYPE_I, a, e.copy(), Uh)


def type2_solution(U, ehat) -> DomainSolution:
    st = as_stretch(U)
    U = st.U
    e = la.unit(ehat, "ehat")
    Uh = reflect_variant(st, e)
    _check_not_degenerate(U, Uh)
    Ue = U @ e
    n = 2.0 * (e - U @ Ue / (Ue @ Ue))
    return _finish(U, e, DomainKind.TYPE_II, Ue.copy(), n, Uh)


def perpendicular_eigenvector(U, ehat, tol=PERP_TOL):
    """An eigenvector v of U with v . ê = 0, or None.

    Repeated eigenvalues are handled: inside a 2-d eigenspace a perpendicular
    vector always exists.
    """
    st = as_stretch(U)
    e = la.unit(ehat)
    vals, V = st.eig.values, st.eig.vectors
    scale = max(abs(vals).max(), 1.0)
    # group eigenvalues into eigenspaces
    groups = []
    for i in range(3):
        if groups and abs(vals[i] - vals[groups[-1][-1]]) <= 1e-10 * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    best, best_dot = None, np.inf
    for g in groups:
        if len(g) == 1:
            v = V[:, g[0]]
            d = abs(v @ e)
        elif len(g) == 2:
            p, q = V[:, g[0]], V[:, g[1]]
            v = (e @ q) * p - (e @ p) * q
            nv = np.linalg.norm(v)
            v = p if nv < 1e-14 else v / nv
            d = abs(v @ e)
        else:
            v = np.cross(e, [1.0, 0.0, 0.0])
            if np.linalg.norm(v) < 1e-8:
                v = np.cross(e, [0.0, 1.0, 0.0])
            v = v / np.linalg.norm(v)
            d = 0.0
        if d < best_dot:
            best, best_dot = v, d
    return best if best_dot <= tol else None


def classify_domain(U, ehat) -> DomainPair:
    st = as_stretch(U)
    e = la.unit(ehat, "ehat")
    _check_not_degenerate(st.U, reflect_variant(st, e))
    return DomainPair.COMPOUND if perpendicular_eigenvector(st, e) is not None else DomainPair.TYPE_I_II


def compound_solutions(U, ehat1):
    """Return (ê₂, solution with n = ê₁, solution with n = ê₂)."""
    st = as_stretch(U)
    U = st.U
    e1 = la.unit(ehat1, "ehat1")
    Uh = reflect_variant(st, e1)
    _check_not_degenerate(U, Uh)
    v = perpendicular_eigenvector(st, e1)
    if v is None:
        raise NotCompound("ê₁ is not perpendicular to any eigenvector of U")
    e2 = np.cross(v, e1)
    e2 /= np.linalg.norm(e2)
    Ui2 = np.linalg.inv(U @ U)
    U2 = U @ U
    xi = 2.0 * (e2 @ Ui2 @ e1) / (e1 @ Ui2 @ e1)
    eta = -2.0 * (e2 @ U2 @ e1) / (e1 @ U2 @ e1)
    s1 = _finish(U, e1, DomainKind.COMPOUND_1, xi * (U @ e2), e1.copy(), Uh)
    s2 = _finish(U, e1, DomainKind.COMPOUND_2, eta * (U @ e1), e2.copy(), Uh)
    return e2, s1, s2


def domain_solutions(U, ehat):
    """Both solutions generated by an axis: (Type I, Type II) or (Compound-1, Compound-2)."""
    if classify_domain(U, ehat) is DomainPair.COMPOUND:
        _, s1, s2 = compound_solutions(U, ehat)
        return s1, s2
    return type1_solution(U, ehat), type2_solution(U, ehat)


@dataclass(frozen=True)
class RecoveredAxes:
    """Result of :func:`recover_axes`.

    ``equal`` is set when B = A (then any eigenvector of A works and ``axes``
    is empty).  ``identities`` records the residuals of the internal sanity
    identities that were checked.
    """

    axes: tuple
    equal: bool = False
    identities: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.axes)

    def __len__(self):
        return len(self.axes)


def recover_axes(A, B, tol=1e-8, id_tol=1e-7) -> RecoveredAxes:
    """All two-fold axes ê with B = Q(ê) A Q(ê), for a rank-one connected pair."""
    A = as_stretch(A)
    B = as_stretch(B)
    Am, Bm = A.U, B.U
    if np.max(np.abs(A.values - B.values)) > tol * max(1.0, A.values.max()):
        raise NotSimilar("A and B have different spectra")
    if np.linalg.norm(Am - Bm) <= tol * np.linalg.norm(Am):
        return RecoveredAxes(axes=(), equal=True)
    Ai = np.linalg.inv(Am)
    C = Ai @ Bm @ Bm @ Ai
    es = la.sym_eigen(C)
    mu1, mu2, mu3 = es.values
    if abs(mu2 - 1.0) > tol:
        raise NotCompatible(f"A and B are not rank-one connected (middle eigenvalue {mu2:.10g})")
    e1, e2, e3 = es.v1, es.v2, es.v3
    A2 = Am @ Am
    x = e2 @ A2 @ e3
    y = e2 @ A2 @ e1
    ident = {
        "mu1mu3": mu1 * mu3 - 1.0,
        "diag": e1 @ A2 @ e1 - mu3 * (e3 @ A2 @ e3),
        "offdiag": y * y - mu3 * x * x,
    }
    scale = np.linalg.norm(A2)
    if max(abs(ident["mu1mu3"]), abs(ident["diag"]) / scale, abs(ident["offdiag"]) / scale**2) > id_tol:
        raise InconsistentInput(f"pair identities violated: {ident}")
    r3 = np.sqrt(mu3)

    def axis(s):
        d = 2.0 * (e1 @ A2 @ e1 + s * r3 * (e3 @ A2 @ e1))
        if d <= 0:
            return None
        d1 = d ** -0.5
        return la.canonical_axis(d1 * (Am @ e1) + s * r3 * d1 * (Am @ e3))

    if abs(x) <= 1e-9 * scale and abs(y) <= 1e-9 * scale:
        axes = tuple(a for a in (axis(1.0), axis(-1.0)) if a is not None)
        if len(axes) == 2 and abs(axes[0] @ axes[1]) > 1e-6:
            raise InconsistentInput("degenerate case produced non-orthogonal axes")
    else:
        # s sqrt(mu3) x = -y fixes the sign; if x*y is at rounding level the
        # selection is ill-conditioned, so check the candidate and fall back
        s = -np.sign(x * y) if x * y != 0 else 1.0
        cands = [c for c in (axis(s), axis(-s)) if c is not None]
        errs = [np.linalg.norm(reflect_variant(A, c) - Bm) for c in cands]
        pick = 0 if errs[0] <= 1e-6 * np.linalg.norm(Bm) else int(np.argmin(errs))
        axes = (cands[pick],)
    for c in axes:
        if np.linalg.norm(reflect_variant(A, c) - Bm) > 1e-6 * np.linalg.norm(Bm):
            raise InconsistentInput("recovered axis does not map A to B")
    return RecoveredAxes(axes=axes, identities={k: float(v) for k, v in ident.items()})
