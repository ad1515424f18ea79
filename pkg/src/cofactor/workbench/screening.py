"""Alloy screening by interpolation between measured compositions.

The stretch tensor is interpolated componentwise (bilinear on a rectilinear
grid of anchor compositions).  Screening first follows the curve lambda2 = 1
(a root in y for each x), then locates the point on that curve where the
chosen compatibility residual vanishes, then checks the inequality.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize
from scipy.interpolate import RegularGridInterpolator

from .. import linalg3 as la
from ..conditions import cc_residuals
from ..errors import InputError, NoCrossing, NoLambda2Curve, NotCompound
from ..twinning import compound_solutions, perpendicular_eigenvector, type1_solution, type2_solution

ROOT_TOL = 1e-10
MAX_ITER = 64
TARGETS = ("type1", "type2", "compound")


class CompositionModel:
    """U(x, y) by bilinear interpolation of anchor tensors on the grid ``xs`` x ``ys``."""

    def __init__(self, xs, ys, U):
        self.xs = np.asarray(xs, float)
        self.ys = np.asarray(ys, float)
        U = np.asarray(U, float)
        if U.shape != (len(self.xs), len(self.ys), 3, 3):
            raise InputError("U", f"expected shape ({len(self.xs)}, {len(self.ys)}, 3, 3), got {U.shape}")
        if np.any(np.diff(self.xs) <= 0) or np.any(np.diff(self.ys) <= 0):
            raise InputError("x", "anchor coordinates must be strictly increasing")
        self.anchors = U
        self._interp = RegularGridInterpolator((self.xs, self.ys), U.reshape(len(self.xs), len(self.ys), 9),
                                               method="linear")

    def __call__(self, x, y) -> np.ndarray:
        U = self._interp([[x, y]])[0].reshape(3, 3)
        return 0.5 * (U + U.T)

    @classmethod
    def from_function(cls, fn, xs, ys):
        """Anchors sampled from ``fn(x, y)``; exact when ``fn`` is bilinear."""
        return cls(xs, ys, [[fn(x, y) for y in ys] for x in xs])


def load_model(path) -> CompositionModel:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError("$", f"cannot read model {path}: {exc}") from None
    for key in ("x", "y", "U"):
        if key not in data:
            raise InputError(key, "missing")
    return CompositionModel(data["x"], data["y"], data["U"])


def bisect(fn, a, b, tol=ROOT_TOL, maxiter=MAX_ITER):
    """Root of ``fn`` in [a, b] (signs must differ); returns (root, |fn(root)|)."""
    fa, fb = fn(a), fn(b)
    if fa == 0:
        return a, 0.0
    if fb == 0:
        return b, 0.0
    if fa * fb > 0:
        raise ValueError("interval does not bracket a root")
    x = optimize.bisect(fn, a, b, xtol=1e-15 * max(1.0, abs(a), abs(b)), maxiter=maxiter, disp=False)
    return float(x), float(abs(fn(x)))


def _lambda2_res(U):
    return float(np.linalg.eigvalsh(U)[1] - 1.0)


class _Target:
    def __init__(self, target, ehat, v2_ref):
        self.target, self.e, self.v2_ref = target, la.unit(ehat), v2_ref

    def residual(self, U) -> float:
        if self.target == "type1":
            return float(np.linalg.norm(np.linalg.solve(U, self.e)) - 1.0)
        if self.target == "type2":
            return float(np.linalg.norm(U @ self.e) - 1.0)
        v2 = la.sym_eigen(U).v2
        if v2 @ self.v2_ref < 0:
            v2 = -v2
        return float(self.e @ v2)

    def cc3(self, U) -> float:
        if self.target == "type1":
            s = type1_solution(U, self.e)
            return cc_residuals(U, s.a, s.n).cc3
        if self.target == "type2":
            s = type2_solution(U, self.e)
            return cc_residuals(U, s.a, s.n).cc3
        if perpendicular_eigenvector(U, self.e) is None:
            raise NotCompound("axis is not a compound axis at the crossing")
        _, s1, s2 = compound_solutions(U, self.e)
        return min(cc_residuals(U, s.a, s.n).cc3 for s in (s1, s2))


@dataclass(frozen=True)
class ScreenResult:
    x: float
    y: float
    U: np.ndarray
    target: str
    lambda2_residual: float
    type_residual: float
    cc3: float
    verdict: str
    trace: list = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return self.verdict == "cofactor conditions satisfied"

    def as_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "U": self.U.tolist(), "target": self.target,
                "lambda2_residual": self.lambda2_residual, "type_residual": self.type_residual,
                "cc3": self.cc3, "verdict": self.verdict, "trace": self.trace}


def _curve_y(model, x, ys):
    """y with lambda2(U(x, y)) = 1, from the first sign change along ``ys``; None if none."""
    vals = [_lambda2_res(model(x, y)) for y in ys]
    for y0, y1, h0, h1 in zip(ys[:-1], ys[1:], vals[:-1], vals[1:]):
        if h0 == 0 or h0 * h1 < 0:
            y, _ = bisect(lambda y: _lambda2_res(model(x, y)), y0, y1)
            return y
    if vals[-1] == 0:
        return float(ys[-1])
    return None


def screen(model, ehat, x_grid, y_grid, target="type1", tol=1e-4) -> ScreenResult:
    """Locate a composition satisfying lambda2 = 1 and the ``target`` residual, then test CC3.

    ``target`` is "type1" (|U^-1 ê| = 1), "type2" (|U ê| = 1) or "compound"
    (ê . v2 = 0).  ``tol`` is the tolerance on the inequality.
    """
    if target not in TARGETS:
        raise InputError("target", f"must be one of {', '.join(TARGETS)}")
    xs, ys = [float(x) for x in x_grid], [float(y) for y in y_grid]
    trace = []
    curve = []
    for x in xs:
        y = _curve_y(model, x, ys)
        trace.append({"x": x, "y": y})
        if y is not None:
            curve.append((x, y))
    if not curve:
        raise NoLambda2Curve("lambda2 - 1 does not change sign along y for any x")
    tg = _Target(target, ehat, la.sym_eigen(model(*curve[0])).v2)
    for row in trace:
        if row["y"] is not None:
            U = model(row["x"], row["y"])
            row["lambda2_residual"] = _lambda2_res(U)
            row["type_residual"] = tg.residual(U)

    def along(x):
        y = _curve_y(model, x, ys)
        if y is None:
            raise NoLambda2Curve(f"lambda2 curve lost at x = {x:g}")
        return tg.residual(model(x, y))

    pts = [r for r in trace if r["y"] is not None]
    for r0, r1 in zip(pts[:-1], pts[1:]):
        if r0["type_residual"] == 0 or r0["type_residual"] * r1["type_residual"] < 0:
            xstar, _ = bisect(along, r0["x"], r1["x"])
            break
    else:
        if pts[-1]["type_residual"] == 0:
            xstar = pts[-1]["x"]
        else:
            raise NoCrossing(f"{target} residual does not change sign along the lambda2 = 1 curve")
    ystar = _curve_y(model, xstar, ys)
    U = model(xstar, ystar)
    cc3 = tg.cc3(U)
    verdict = "cofactor conditions satisfied" if cc3 >= -tol else "interpolation found, inequality fails"
    return ScreenResult(x=float(xstar), y=float(ystar), U=U, target=target,
                        lambda2_residual=_lambda2_res(U), type_residual=tg.residual(U), cc3=float(cc3),
                        verdict=verdict, trace=trace)
