"""Small fixed-size (3x3) linear algebra kernels.

Everything here operates on plain ``numpy`` arrays of shape (3,) or (3, 3).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotCompatible

I3 = np.eye(3)


def as_mat3(A, name="matrix") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape != (3, 3):
        raise InvalidInput(f"{name} must be 3x3, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} has non-finite entries")
    return A


def as_vec3(v, name="vector") -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise InvalidInput(f"{name} must have 3 components, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInput(f"{name} has non-finite entries")
    return v


def unit(v, name="vector") -> np.ndarray:
    v = as_vec3(v, name)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise InvalidInput(f"{name} is the zero vector")
    return v / nv


def canonical_axis(e, tol=1e-12) -> np.ndarray:
    """Unit vector with its first (non-negligible) nonzero component positive.

    ``e`` and ``-e`` generate the same 180 degree rotation; this picks a representative.
    """
    e = unit(e, "axis")
    for c in e:
        if abs(c) > tol:
            return e if c > 0 else -e
    return e


def is_symmetric(A, tol=1e-12) -> bool:
    A = np.asarray(A, dtype=float)
    return bool(np.max(np.abs(A - A.T)) <= tol * max(1.0, np.max(np.abs(A))))


def is_rotation(R, tol=1e-10) -> bool:
    R = np.asarray(R, dtype=float)
    return bool(np.linalg.norm(R.T @ R - I3) <= tol and abs(np.linalg.det(R) - 1.0) <= tol)


def outer(a, b) -> np.ndarray:
    return np.outer(np.asarray(a, float), np.asarray(b, float))


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and a right-handed orthonormal frame (columns of ``vectors``)."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def v1(self):
        return self.vectors[:, 0]

    @property
    def v2(self):
        return self.vectors[:, 1]

    @property
    def v3(self):
        return self.vectors[:, 2]

    def reconstruct(self) -> np.ndarray:
        V = self.vectors
        return V @ np.diag(self.values) @ V.T


def _sign_fix(v, tol=1e-12):
    # largest-magnitude component positive; near-ties go to the lowest index
    mags = np.abs(v)
    k = int(np.flatnonzero(mags >= mags.max() * (1.0 - tol))[0])
    return v if v[k] > 0 else -v


def sym_eigen(S) -> EigenSystem:
    """Eigen-decomposition of a symmetric 3x3 matrix.

    The input is symmetrized first.  Eigenvalues come back ascending.  Each of
    v1, v3 has its largest-magnitude component positive, and v2 = v3 x v1 makes
    the frame right-handed (det = +1).
    """
    S = as_mat3(S, "S")
    S = 0.5 * (S + S.T)
    w, V = np.linalg.eigh(S)
    v1 = _sign_fix(V[:, 0])
    v3 = _sign_fix(V[:, 2])
    v2 = np.cross(v3, v1)
    v2 /= np.linalg.norm(v2)
    return EigenSystem(values=w, vectors=np.column_stack([v1, v2, v3]))


def cofactor_matrix(A) -> np.ndarray:
    """(cof A)_ij = (-1)^(i+j) det(minor_ij), computed from 2x2 minors (valid for singular A)."""
    A = as_mat3(A)
    C = np.empty((3, 3))
    for i in range(3):
        i1, i2 = [r for r in range(3) if r != i]
        for j in range(3):
            j1, j2 = [c for c in range(3) if c != j]
            C[i, j] = (-1) ** (i + j) * (A[i1, j1] * A[i2, j2] - A[i1, j2] * A[i2, j1])
    return C


def two_fold(e) -> np.ndarray:
    """180 degree rotation about ``e``: Q = -I + 2 e (x) e."""
    e = unit(e, "axis")
    return -I3 + 2.0 * np.outer(e, e)


def nearest_rotation(A) -> np.ndarray:
    """Closest proper rotation in the Frobenius norm (polar factor)."""
    W, _, Vt = np.linalg.svd(as_mat3(A))
    D = np.diag([1.0, 1.0, np.sign(np.linalg.det(W @ Vt))])
    return W @ D @ Vt


def recover_rotation(A, B, tol=1e-8) -> np.ndarray:
    """Return R with R B = A, i.e. A B^-1 re-orthonormalized.

    Raises NotCompatible when A B^-1 is not a rotation within ``tol``.
    """
    A = as_mat3(A, "A")
    B = as_mat3(B, "B")
    Rq = A @ np.linalg.inv(B)
    err = np.linalg.norm(Rq.T @ Rq - I3)
    if err > tol or np.linalg.det(Rq) <= 0:
        raise NotCompatible(f"A B^-1 is not a rotation (orthogonality defect {err:.3e})")
    return nearest_rotation(Rq)


def sqrtm_spd(M) -> np.ndarray:
    """Symmetric positive-definite square root."""
    es = sym_eigen(M)
    if es.values[0] <= 0:
        raise InvalidInput("matrix is not positive-definite")
    V = es.vectors
    return V @ np.diag(np.sqrt(es.values)) @ V.T


def angle_axis(R):
    """Rotation angle (radians) and unit axis; axis is canonicalized for angle ~ pi."""
    from scipy.spatial.transform import Rotation

    rv = Rotation.from_matrix(as_mat3(R)).as_rotvec()
    ang = float(np.linalg.norm(rv))
    if ang < 1e-14:
        return 0.0, np.array([0.0, 0.0, 1.0])
    ax = rv / ang
    if abs(ang - np.pi) < 1e-9:
        ax = canonical_axis(ax)
    return ang, ax
