"""Zero-energy microstructures on the unit cube, built from half-space polyhedra.

Every scene is a list of convex cells.  Each cell carries an affine map
y = F x + t; the translations are propagated over the adjacency graph so the
deformation is continuous, and every shared facet is checked against the
Hadamard jump condition F+ - F- = c (x) N with its geometric normal.
"""
from __future__ import annotations

import csv
import io
import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from . import linalg3 as la
from .conditions import cofactor_report, default_tol
from .errors import Degenerate, InvalidInput, NotCompatible, NotSupercompatible
from .habit import habit_solutions, midplane_solutions
from .twinning import as_stretch, type1_solution, type2_solution

EMPTY_TOL = 1e-9     # Chebyshev radius below which a cell (or facet) counts as empty
PLANE_TOL = 1e-12
CENTER = np.full(3, 0.5)

_CUBE = [(np.eye(3)[i], 1.0) for i in range(3)] + [(-np.eye(3)[i], 0.0) for i in range(3)]


@dataclass
class Region:
    halfspaces: list          # [(N, d)] meaning N . x <= d, N unit; cube faces included
    F: np.ndarray
    t: np.ndarray
    label: str
    index: int = -1

    def contains(self, x, tol=1e-12) -> bool:
        return all(N @ x <= d + tol for N, d in self.halfspaces)

    def map(self, x):
        return np.asarray(x) @ self.F.T + self.t

    def volume(self) -> float:
        return polytope_volume(self.halfspaces)


@dataclass(frozen=True)
class Interface:
    normal: np.ndarray        # unit, outward from regions[0]
    regions: tuple
    jump: np.ndarray          # c with F1 - F0 ~ c (x) N
    residual: float           # |(F1 - F0)(I - N (x) N)|
    continuity: float         # max |y0 - y1| at sample points of the shared facet
    internal: bool            # both sides carry the same gradient


@dataclass
class MicrostructureScene:
    regions: list
    interfaces: list
    metadata: dict = field(default_factory=dict)

    def region_at(self, x, tol=1e-12):
        """Lowest-index region containing ``x`` (the boundary tie rule)."""
        for r in self.regions:
            if r.contains(x, tol):
                return r
        return None

    def deform(self, x):
        r = self.region_at(x)
        if r is None:
            raise InvalidInput(f"point {x} is outside every region")
        return r.map(x)

    def max_hadamard_residual(self) -> float:
        return max((i.residual for i in self.interfaces), default=0.0)

    def max_continuity_residual(self) -> float:
        return max((i.continuity for i in self.interfaces), default=0.0)

    def volumes(self) -> dict:
        out = {}
        for r in self.regions:
            out[r.label] = out.get(r.label, 0.0) + r.volume()
        return out

    def zero_energy_residual(self, wells=None) -> float:
        wells = self.metadata.get("wells") if wells is None else wells
        if wells is None:
            raise InvalidInput("scene has no wells in its metadata")
        return max(well_distance(r.F, wells) for r in self.regions)

    def to_json(self) -> str:
        def arr(x):
            return np.asarray(x).tolist()

        meta = {}
        for k, v in self.metadata.items():
            if k == "wells":
                meta[k] = [arr(w) for w in v]
            elif isinstance(v, np.ndarray):
                meta[k] = arr(v)
            elif isinstance(v, (np.floating, np.integer)):
                meta[k] = v.item()
            else:
                meta[k] = v
        return json.dumps({
            "regions": [{"index": r.index, "label": r.label, "F": arr(r.F), "t": arr(r.t),
                         "halfspaces": [[*arr(N), float(d)] for N, d in r.halfspaces]}
                        for r in self.regions],
            "interfaces": [{"regions": list(i.regions), "normal": arr(i.normal), "jump": arr(i.jump),
                            "residual": i.residual, "continuity": i.continuity,
                            "internal": i.internal} for i in self.interfaces],
            "metadata": meta,
        }, indent=1)


# ----------------------------------------------------------------------------
# polytope helpers

def _normalize(hs):
    out = []
    for N, d in hs:
        N = np.asarray(N, float)
        s = np.linalg.norm(N)
        if s < 1e-15:
            raise InvalidInput("degenerate half-space normal")
        out.append((N / s, float(d) / s))
    return out


def chebyshev_center(hs, equality=None):
    """(center, radius) of the largest ball inside the polytope (ball in the plane if ``equality``)."""
    A, b = [], []
    for N, d in hs:
        if equality is not None:
            Nt = N - (N @ equality[0]) * equality[0]
            A.append([*N, np.linalg.norm(Nt)])
        else:
            A.append([*N, 1.0])
        b.append(d)
    kw = {}
    if equality is not None:
        kw = dict(A_eq=[[*equality[0], 0.0]], b_eq=[equality[1]])
    res = linprog([0, 0, 0, -1.0], A_ub=np.array(A), b_ub=np.array(b), bounds=[(None, None)] * 3 + [(0, None)],
                  method="highs", **kw)
    if res.status != 0:
        return None, 0.0
    return res.x[:3], float(res.x[3])


def polytope_vertices(hs, center=None):
    if center is None:
        center, r = chebyshev_center(hs)
        if center is None or r < EMPTY_TOL:
            return np.zeros((0, 3))
    H = np.array([[*N, -d] for N, d in hs])
    return HalfspaceIntersection(H, center).intersections


def polytope_volume(hs) -> float:
    pts = polytope_vertices(hs)
    return float(ConvexHull(pts).volume) if len(pts) >= 4 else 0.0


def _facet_tangents(N):
    t1 = np.cross(N, [1.0, 0.0, 0.0])
    if np.linalg.norm(t1) < 0.5:
        t1 = np.cross(N, [0.0, 1.0, 0.0])
    t1 /= np.linalg.norm(t1)
    return t1, np.cross(N, t1)


def well_distance(F, wells) -> float:
    """Distance of F to the union of SO(3) W over ``wells`` (via the right stretch of F)."""
    F = np.asarray(F, float)
    if np.linalg.det(F) <= 0:
        return float("inf")
    C = F.T @ F
    V = la.sqrtm_spd(0.5 * (C + C.T))
    return float(min(np.linalg.norm(V - np.asarray(W)) for W in wells))


# ----------------------------------------------------------------------------
# generic builder

def build_scene(cells, metadata=None, anchor=0, anchor_t=None) -> MicrostructureScene:
    """Assemble a scene from ``cells = [(halfspaces, F, label), ...]``.

    Empty cells are dropped, adjacencies found from shared planes, and the
    translations fixed by a breadth-first walk from cell ``anchor``.
    """
    regions = []
    verts = []
    kept = {}
    for k, (hs, F, label) in enumerate(cells):
        hs = _normalize(list(hs) + _CUBE)
        c, r = chebyshev_center(hs)
        if c is None or r < EMPTY_TOL:
            continue
        kept[k] = len(regions)
        verts.append(polytope_vertices(hs, c))
        regions.append(Region(hs, la.as_mat3(F, "F").copy(), np.zeros(3), label, len(regions)))
    if not regions:
        raise InvalidInput("scene has no nonempty region")
    # candidate facets: the same plane appearing with opposite orientation in two cells
    planes = {}
    for r in regions:
        for N, d in r.halfspaces:
            sgn = 1.0 if next(c for c in N if abs(c) > 1e-12) > 0 else -1.0
            key = tuple(np.round(np.r_[sgn * N, sgn * d], 9))
            planes.setdefault(key, []).append((r.index, sgn, N, d))
    adj = {r.index: [] for r in regions}
    facets = []
    done = set()
    for members in planes.values():
        for i, si, N, d in members:
            for j, sj, _, _ in members:
                if i >= j or si == sj or (i, j) in done:
                    continue
                Ri, Rj = regions[i], regions[j]
                # cheap rejection: the on-plane vertices of both cells must have overlapping boxes
                vi = verts[i][np.abs(verts[i] @ N - d) < 1e-9]
                vj = verts[j][np.abs(verts[j] @ N - d) < 1e-9]
                if len(vi) < 3 or len(vj) < 3 or np.any(vi.min(0) > vj.max(0) + 1e-9) \
                        or np.any(vj.min(0) > vi.max(0) + 1e-9):
                    continue
                x0, r = chebyshev_center(Ri.halfspaces + Rj.halfspaces, equality=(N, d))
                if x0 is not None and r > EMPTY_TOL:
                    done.add((i, j))
                    facets.append((i, j, N, x0, r))
                    adj[i].append(len(facets) - 1)
                    adj[j].append(len(facets) - 1)
    # BFS for translations
    start = kept.get(anchor, 0)
    regions[start].t = np.zeros(3) if anchor_t is None else np.asarray(anchor_t, float)
    seen = {start}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        for fi in adj[i]:
            a, b, N, x0, _ = facets[fi]
            j = b if a == i else a
            if j in seen:
                continue
            Ri, Rj = regions[i], regions[j]
            Rj.t = Ri.t + (Ri.F - Rj.F) @ x0
            seen.add(j)
            queue.append(j)
    if len(seen) != len(regions):
        raise NotCompatible("scene adjacency graph is disconnected")
    interfaces = []
    for a, b, N, x0, r in facets:
        Ra, Rb = regions[a], regions[b]
        D = Rb.F - Ra.F
        P = la.I3 - np.outer(N, N)
        t1, t2 = _facet_tangents(N)
        pts = [x0, x0 + 0.9 * r * t1, x0 + 0.9 * r * t2]
        cont = max(np.linalg.norm(Ra.map(p) - Rb.map(p)) for p in pts)
        interfaces.append(Interface(
            normal=N, regions=(a, b), jump=D @ N, residual=float(np.linalg.norm(D @ P)),
            continuity=float(cont), internal=bool(np.linalg.norm(D) < 1e-14)))
    return MicrostructureScene(regions, interfaces, dict(metadata or {}))


def _hs(g, offset, p0=CENTER):
    """Half-space g . (x - p0) <= offset."""
    g = np.asarray(g, float)
    return (g, float(g @ p0 + offset))


def _ge(g, offset, p0=CENTER):
    """Half-space g . (x - p0) >= offset."""
    g = np.asarray(g, float)
    return (-g, float(-(g @ p0) - offset))


def identity_scene() -> MicrostructureScene:
    return build_scene([([], la.I3, "A")], dict(kind="identity", wells=[la.I3]))


# ----------------------------------------------------------------------------
# Type I: triple junctions

@dataclass(frozen=True)
class TripleJunction:
    sigma: int
    sigma_star: int
    xi: float
    c: float
    R0: np.ndarray
    b0: np.ndarray           # scaled so that m0 is a unit vector
    m0: np.ndarray
    g1: np.ndarray           # xi m1, the A / second-variant normal (R0 Rhat Uhat - I = b0 (x) g1)
    n: np.ndarray
    a: np.ndarray
    F1: np.ndarray           # R0 U
    F2: np.ndarray           # R0 Rhat Uhat
    wells: tuple
    rotation_gap: float      # |R1^sigma* - R0^sigma|
    rank_one_residuals: tuple
    triple_product: float


def _require(report, which):
    ok = report.verdicts.get(which, False)
    if not ok:
        res = max(abs(report.cc1), abs(report.typeI_residual_sq if which == "Type I" else report.typeII_residual_sq))
        raise NotSupercompatible(f"cofactor conditions fail for {which} (residual {res:.4g})",
                                 report=report, residual=float(res))


def _rescale(b, m):
    s = np.linalg.norm(m)
    return b * s, m / s


def junction_data(U, ehat, tol=None) -> TripleJunction:
    """The gradients, normals and the labels sigma, sigma* of a Type I triple junction."""
    tol = default_tol() if tol is None else tol
    st = as_stretch(U)
    U = st.U
    report = cofactor_report(st, ehat, tol)
    _require(report, "Type I")
    sol = type1_solution(st, report.ehat)
    a, n = sol.a, sol.n
    e = report.ehat
    f0 = midplane_solutions(U @ U, tol_mid=max(tol, 1e-6))
    sigma_idx = int(np.argmin([abs(s["b"] @ e) / np.linalg.norm(s["b"]) for s in f0]))
    s0 = f0[sigma_idx]
    R0, (b0, m0) = s0["R"], _rescale(s0["b"], s0["m"])
    f1 = habit_solutions(U, a, n, 1.0, tol_mid=max(tol, 1e-6))
    gaps = [np.linalg.norm(s.R - R0) for s in f1]
    k1 = int(np.argmin(gaps))
    s1 = f1[k1]
    gap = float(gaps[k1])
    if gap > 1e-7:
        raise NotSupercompatible(f"no f = 1 solution shares the rotation R0 (gap {gap:.3e})",
                                 report=report, residual=gap)
    b1 = s1.b
    xi = float(b1 @ b0 / (b0 @ b0))
    F1 = R0 @ U
    F2 = R0 @ sol.Rhat @ sol.Uhat
    g1 = (F2 - la.I3).T @ b0 / (b0 @ b0)
    c = float((g1 - m0) @ n / (n @ n))
    res = (
        float(np.linalg.norm(F1 - la.I3 - np.outer(b0, m0))),
        float(np.linalg.norm(F2 - la.I3 - np.outer(b0, g1))),
        float(np.linalg.norm(F2 - F1 - np.outer(R0 @ a, n))),
    )
    tp = float(abs(np.linalg.det(np.column_stack([m0, g1 / np.linalg.norm(g1), n / np.linalg.norm(n)]))))
    return TripleJunction(
        sigma=int(s0["kappa"]), sigma_star=int(s1.kappa), xi=xi, c=c, R0=R0, b0=b0, m0=m0, g1=g1,
        n=n, a=a, F1=F1, F2=F2, wells=(la.I3, U, sol.Uhat), rotation_gap=gap,
        rank_one_residuals=res, triple_product=tp)


def triple_junction(U, ehat, tol=None, p0=CENTER):
    """A single austenite / two-variant junction line through ``p0``.

    Returns ``(scene, sigma, sigma_star, xi, c)``.
    """
    j = junction_data(U, ehat, tol)
    if j.triple_product > 1e-8:
        raise NotCompatible(f"junction normals are not coplanar (triple product {j.triple_product:.3e})")
    s = 1.0 if j.c >= 0 else -1.0
    P, Q, S = s * j.m0, s * j.g1, j.n
    cells = [
        ([_ge(P, 0.0, p0), _hs(S, 0.0, p0)], la.I3, "A"),
        ([_ge(Q, 0.0, p0), _ge(S, 0.0, p0)], la.I3, "A"),
        ([_hs(P, 0.0, p0), _hs(S, 0.0, p0)], j.F1, "M1"),
        ([_hs(Q, 0.0, p0), _ge(S, 0.0, p0)], j.F2, "M2"),
    ]
    meta = dict(kind="triple_junction", wells=list(j.wells), sigma=j.sigma, sigma_star=j.sigma_star,
                xi=j.xi, c=j.c, normals=[j.m0.tolist(), j.g1.tolist(), j.n.tolist()],
                triple_product=j.triple_product, rank_one_residuals=list(j.rank_one_residuals))
    return build_scene(cells, meta), j.sigma, j.sigma_star, j.xi, j.c


def _bands(smin, smax, f, k, start=0.0):
    """Alternating (lo, hi, second_variant) bands of period 1/k covering [smin, smax].

    Each period starts with the first variant (width (1 - f)/k) followed by the
    second (width f/k); periods are aligned so that one starts at ``start``.
    """
    w = 1.0 / k
    j0 = int(np.floor((smin - start) / w)) - 1
    out = []
    j = j0
    while start + j * w < smax:
        lo = start + j * w
        mid = lo + (1.0 - f) * w
        if f < 1.0:
            out.append((lo, mid, False))
        if f > 0.0:
            out.append((mid, lo + w, True))
        j += 1
    return [(max(lo, smin), min(hi, smax), v) for lo, hi, v in out if hi > smin and lo < smax]


def _extent(g, p0=CENTER):
    corners = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], float)
    vals = (corners - p0) @ g
    return float(vals.min()), float(vals.max())


def type1_interface(U, ehat, f, k=4, tol=None, aspect=1.0, p0=CENTER):
    """Zig-zag chain of triple junctions forming a macroscopic austenite/twin interface.

    Twin bands of period ``1/k`` (measured along n) alternate between the two
    variants with fractions 1 - f and f.  Within a first-variant band the
    austenite boundary is a plane with normal m0, within a second-variant band
    one with normal xi m1; successive pieces meet on the twin planes, so each
    corner is a triple junction.  ``aspect`` scales the junction spacing along
    the interface relative to the band period.
    """
    if not 0.0 <= f <= 1.0:
        raise InvalidInput("f must lie in [0, 1]")
    j = junction_data(U, ehat, tol)
    s = 1.0 if j.c >= 0 else -1.0
    nh = j.n / np.linalg.norm(j.n)
    cn = j.c * np.linalg.norm(j.n)          # g1 - m0 = cn * nh
    lo, hi = _extent(nh, p0)
    kk = max(1, int(round(k / aspect)))
    cells = []
    if f in (0.0, 1.0):
        bands = [(lo - 1.0, hi + 1.0, f == 1.0)]
    else:
        bands = _bands(lo, hi, f, kk)
    # psi = P + cn * H(S) with H(S) the signed second-variant length between 0 and S;
    # acc_lo[i] is H at the lower edge of band i
    zero = next((i for i, b in enumerate(bands) if b[0] <= 0.0 < b[1]), 0)
    acc_lo = [0.0] * len(bands)
    # forward from the band containing 0
    lo0, hi0, v0 = bands[zero]
    acc_lo[zero] = -(0.0 - lo0) if v0 else 0.0
    for i in range(zero + 1, len(bands)):
        plo, phi, pv = bands[i - 1]
        acc_lo[i] = acc_lo[i - 1] + ((phi - plo) if pv else 0.0)
    for i in range(zero - 1, -1, -1):
        blo, bhi, bv = bands[i]
        acc_lo[i] = acc_lo[i + 1] - ((bhi - blo) if bv else 0.0)
    for (blo, bhi, second), h in zip(bands, acc_lo):
        slab = [_ge(nh, blo, p0), _hs(nh, bhi, p0)]
        if second:
            # psi = P + cn (S - blo) + cn h = Q + cn (h - blo)
            g, off = j.g1, -cn * (h - blo)
            F = j.F2
        else:
            g, off = j.m0, -cn * h
            F = j.F1
        cells.append((slab + [_ge(s * g, s * off, p0)], la.I3, "A"))
        cells.append((slab + [_hs(s * g, s * off, p0)], F, "M2" if second else "M1"))
    meta = dict(kind="type1_interface", f=float(f), k=int(k), aspect=float(aspect), wells=list(j.wells),
                sigma=j.sigma, sigma_star=j.sigma_star, xi=j.xi, c=j.c)
    return build_scene(cells, meta)


# ----------------------------------------------------------------------------
# Type II: interfaces independent of f

def parallel_data(U, ehat, tol=None):
    tol = default_tol() if tol is None else tol
    st = as_stretch(U)
    U = st.U
    report = cofactor_report(st, ehat, tol)
    _require(report, "Type II")
    sol = type2_solution(st, report.ehat)
    nh = sol.n / np.linalg.norm(sol.n)
    f0 = midplane_solutions(U @ U, tol_mid=max(tol, 1e-6))
    cross = [np.linalg.norm(np.cross(s["m"] / np.linalg.norm(s["m"]), nh)) for s in f0]
    k = int(np.argmin(cross))
    if cross[k] > max(1e-7, tol):     # defect is first order in the residuals
        raise NotSupercompatible(f"no f = 0 habit normal parallel to n (defect {cross[k]:.3e})",
                                 report=report, residual=float(cross[k]))
    s0 = f0[k]
    b0, m0 = _rescale(s0["b"], s0["m"])
    return dict(sigma=int(s0["kappa"]), R0=s0["R"], b0=b0, m0=m0, solution=sol,
                c=float(np.linalg.norm(sol.n) * np.sign(sol.n @ m0)), cross=float(cross[k]),
                wells=(la.I3, U, sol.Uhat))


def habit_normal_sweep(U, ehat, grid, tol=None):
    """Habit normals (unit) of the family parallel to n for a Type II CC system, one per f."""
    tol = default_tol() if tol is None else tol
    d = parallel_data(U, ehat, tol)
    sol = d["solution"]
    nh = sol.n / np.linalg.norm(sol.n)
    out = []
    for f in grid:
        sols = habit_solutions(as_stretch(U).U, sol.a, sol.n, f, tol_mid=max(tol, 1e-6))
        best = min(sols, key=lambda s: np.linalg.norm(np.cross(s.m / np.linalg.norm(s.m), nh)))
        m = best.m / np.linalg.norm(best.m)
        out.append(m if m @ nh >= 0 else -m)
    return np.array(out), nh


def parallel_interface(U, ehat, f, k=8, tol=None, p0=CENTER):
    """Austenite meeting a laminate whose twin planes are parallel to the habit plane."""
    if not 0.0 <= f <= 1.0:
        raise InvalidInput("f must lie in [0, 1]")
    d = parallel_data(U, ehat, tol)
    sol = d["solution"]
    U = as_stretch(U).U
    R0, m0 = d["R0"], d["m0"]
    F1 = R0 @ U
    F2 = R0 @ sol.Rhat @ sol.Uhat
    lo, hi = _extent(m0, p0)
    cells = [([_hs(m0, 0.0, p0)], la.I3, "A")]
    if f in (0.0, 1.0):
        bands = [(0.0, hi + 1.0, f == 1.0)]
    else:
        bands = [b for b in _bands(0.0, hi, f, k) if b[1] > b[0]]
    for blo, bhi, second in bands:
        cells.append(([_ge(m0, blo, p0), _hs(m0, bhi, p0)], F2 if second else F1, "M2" if second else "M1"))
    meta = dict(kind="parallel_interface", f=float(f), k=int(k), wells=list(d["wells"]),
                sigma=d["sigma"], habit_normal=m0.tolist(), c=d["c"])
    return build_scene(cells, meta)


def laminate_scene(U, ehat, f, k=8, type_="I", p0=CENTER):
    """A bare twin laminate (no austenite), useful for rendering checks."""
    st = as_stretch(U)
    sol = type1_solution(st, ehat) if type_ == "I" else type2_solution(st, ehat)
    nh = sol.n / np.linalg.norm(sol.n)
    lo, hi = _extent(nh, p0)
    cells = []
    for blo, bhi, second in _bands(lo, hi, f, k):
        cells.append(([_ge(nh, blo, p0), _hs(nh, bhi, p0)],
                      sol.Rhat @ sol.Uhat if second else st.U, "M2" if second else "M1"))
    return build_scene(cells, dict(kind="laminate", f=float(f), k=int(k), wells=[st.U, sol.Uhat]))


# ----------------------------------------------------------------------------
# classical construction with a transition layer

def crystallographic_scene(U, ehat, f, k=10, kappa=1, solution="auto", tol_mid=1e-6, p0=CENTER):
    """Austenite | transition layer of width 1/k | twinned laminate with k bands per unit length.

    ``solution`` picks the twin: "I", "II", "C1", "C2" or "auto" (first of the
    pair the axis generates).  The layer is split into triangular prisms along
    l = m x n on which the deformation linearly interpolates between I and the
    laminate.
    """
    from .twinning import domain_solutions, compound_solutions, classify_domain, DomainPair

    st = as_stretch(U)
    U = st.U
    e = la.unit(ehat)
    if solution in ("C1", "C2") or (solution == "auto" and classify_domain(st, e) is DomainPair.COMPOUND):
        _, c1, c2 = compound_solutions(st, e)
        sol = c2 if solution == "C2" else c1
    elif solution == "II":
        sol = type2_solution(st, e)
    else:
        sol = domain_solutions(st, e)[0] if solution == "auto" else type1_solution(st, e)
    a, n = sol.a, sol.n
    hab = habit_solutions(U, a, n, f, tol_mid=tol_mid)
    h = next((s for s in hab if s.kappa == kappa), hab[0])
    R, b, m = h.R, h.b, h.m
    nn = np.linalg.norm(n)
    nh, ap = n / nn, a * nn
    mh = m / np.linalg.norm(m)
    F1, F2 = R @ U, R @ (U + np.outer(a, n))
    ell = np.cross(mh, nh)
    width = 1.0 / k
    lo_n, hi_n = _extent(nh, p0)
    bands = _bands(lo_n, hi_n, f, k)

    def H(sv):   # signed length of second-variant bands between 0 and sv
        lo_, hi_ = min(0.0, sv), max(0.0, sv)
        total = sum(max(0.0, min(bhi, hi_) - max(blo, lo_)) for blo, bhi, second in bands if second)
        return total if sv >= 0 else -total

    def yL(x):   # laminate deformation, y_L(p0) = p0
        sv = (x - p0) @ nh
        return p0 + F1 @ (x - p0) + R @ ap * H(sv)

    cells = [([_hs(mh, 0.0, p0)], la.I3, "A")]
    layer = np.linalg.norm(ell) > 1e-8
    top = width if layer else 0.0
    for blo, bhi, second in bands:
        Fb = F2 if second else F1
        cells.append(([_ge(mh, top, p0), _ge(nh, blo, p0), _hs(nh, bhi, p0)], Fb, "M2" if second else "M1"))
    if layer:
        lh = ell / np.linalg.norm(ell)
        uu = mh
        ww = np.cross(lh, uu)

        def pt(u, sv):   # point with m.(x - p0) = u, n.(x - p0) = sv, l.(x - p0) = 0
            A = np.vstack([uu, nh, lh])
            return p0 + np.linalg.solve(A, [u, sv, 0.0])

        def affine(P, Y):
            # F maps l to l and P_k - P_0 to Y_k - Y_0
            D = np.column_stack([P[1] - P[0], P[2] - P[0], lh])
            Yd = np.column_stack([Y[1] - Y[0], Y[2] - Y[0], lh])
            return Yd @ np.linalg.inv(D)

        for blo, bhi, second in bands:
            B0, B1 = pt(0.0, blo), pt(0.0, bhi)
            T0, T1 = pt(top, blo), pt(top, bhi)
            diag_dir = T1 - B0
            dn = np.cross(lh, diag_dir)
            dn /= np.linalg.norm(dn)
            # side of the diagonal containing B1 vs T0
            if dn @ (B1 - B0) < 0:
                dn = -dn
            base = [_ge(mh, 0.0, p0), _hs(mh, top, p0), _ge(nh, blo, p0), _hs(nh, bhi, p0)]
            # triangle (B0, B1, T1): dn . (x - B0) >= 0
            for tri, side in (((B0, B1, T1), 1.0), ((B0, T1, T0), -1.0)):
                Y = [x if abs((x - p0) @ mh) < 1e-14 else yL(x) for x in tri]
                Ft = affine(tri, Y)
                hs = base + [(-side * dn, float(-side * dn @ B0))]
                cells.append((hs, Ft, "T"))
    meta = dict(kind="crystallographic", f=float(f), k=int(k), kappa=int(h.kappa), layer_width=top,
                habit_normal=mh.tolist(), wells=[la.I3, U, sol.Uhat])
    return build_scene(cells, meta)


# ----------------------------------------------------------------------------
# nucleation

def _wedge_offset(P, Q, p0=CENTER):
    """min over the cube of max(P.(x - p0), Q.(x - p0))."""
    A = [[*P, -1.0], [*Q, -1.0]] + [[*N, 0.0] for N, _ in _CUBE]
    b = [P @ p0, Q @ p0] + [d for _, d in _CUBE]
    res = linprog([0, 0, 0, 1.0], A_ub=A, b_ub=b, bounds=[(None, None)] * 4, method="highs")
    return float(res.x[3])


def nucleation_scene(U, ehat, kind="austenite_in_martensite", opening=0.1, band=0.2, tol=None,
                     p0=CENTER):
    """Nucleation layouts on a Type I CC system.

    ``austenite_in_martensite``: a first-variant band (width ``band`` in the
    c n . x coordinate) inside the second variant; a parallelogram of austenite
    bounded by two m0-planes and two xi m1-planes replaces the band over
    |m0 . (x - p0)| <= opening, with a triple junction at each of its four corners.
    opening = 0 is the plain laminate.

    ``martensite_in_austenite``: a convex two-variant wedge of martensite whose
    edge (a triple-junction line) advances by ``opening`` from the position
    where the wedge first touches the cube; opening = 0 is pure austenite.
    """
    if opening < 0:
        raise InvalidInput("opening must be non-negative")
    j = junction_data(U, ehat, tol)
    P, Q, S = j.m0, j.g1, j.n
    cS = j.c * S               # Q - P = c S
    eps, eta = float(opening), 0.5 * float(band)
    meta = dict(kind=kind, opening=eps, band=float(band), wells=list(j.wells), sigma=j.sigma,
                sigma_star=j.sigma_star, xi=j.xi, c=j.c)
    if kind == "austenite_in_martensite":
        QmP = cS
        cells = []
        L = [_hs(P, -eps, p0)]
        C = [_ge(P, -eps, p0), _hs(P, eps, p0)]
        Rr = [_ge(P, eps, p0)]
        cells += [
            (L + [_hs(QmP, eps - eta, p0)], j.F2, "M2"),
            (L + [_ge(QmP, eps - eta, p0), _hs(QmP, eps + eta, p0)], j.F1, "M1"),
            (L + [_ge(QmP, eps + eta, p0)], j.F2, "M2"),
            (C + [_hs(Q, -eta, p0)], j.F2, "M2"),
            (C + [_ge(Q, -eta, p0), _hs(Q, eta, p0)], la.I3, "A"),
            (C + [_ge(Q, eta, p0)], j.F2, "M2"),
            (Rr + [_hs(QmP, -eps - eta, p0)], j.F2, "M2"),
            (Rr + [_ge(QmP, -eps - eta, p0), _hs(QmP, eta - eps, p0)], j.F1, "M1"),
            (Rr + [_ge(QmP, eta - eps, p0)], j.F2, "M2"),
        ]
        return build_scene(cells, meta, anchor=0)
    if kind == "martensite_in_austenite":
        s = 1.0 if j.c >= 0 else -1.0
        Ps, Qs = s * P, s * Q
        tau = _wedge_offset(Ps, Qs, p0) + eps
        # edge line: Ps = Qs = tau, i.e. S = 0 shifted so the junction line lies on it
        cells = [
            ([_ge(Ps, tau, p0), _hs(S, 0.0, p0)], la.I3, "A"),
            ([_ge(Qs, tau, p0), _ge(S, 0.0, p0)], la.I3, "A"),
            ([_hs(Ps, tau, p0), _hs(S, 0.0, p0)], j.F1, "M1"),
            ([_hs(Qs, tau, p0), _ge(S, 0.0, p0)], j.F2, "M2"),
        ]
        meta["edge_offset"] = tau
        return build_scene(cells, meta, anchor=0)
    raise InvalidInput(f"unknown nucleation kind {kind!r}")


# ----------------------------------------------------------------------------
# rendering

FACES = ("x0", "x1", "y0", "y1", "z0", "z1")


def boundary_points(d, faces=None):
    """Integer-grid points (spacing 1/d) on the chosen faces of the cube, sorted and deduplicated."""
    if d < 1:
        raise InvalidInput("density must be >= 1")
    faces = FACES if faces is None else tuple(faces)
    pts = set()
    rng = range(d + 1)
    for fc in faces:
        if fc not in FACES:
            raise InvalidInput(f"unknown face {fc!r}")
        ax = "xyz".index(fc[0])
        val = 0 if fc[1] == "0" else d
        o1, o2 = [i for i in range(3) if i != ax]
        for i in rng:
            for k in rng:
                p = [0, 0, 0]
                p[ax], p[o1], p[o2] = val, i, k
                pts.add(tuple(p))
    return np.array(sorted(pts), float) / d


def render_point_cloud(scene: MicrostructureScene, d, faces=None, points=None):
    """Deformed sample points y(x) with labels; returns (X, Y, labels)."""
    X = boundary_points(d, faces) if points is None else np.asarray(points, float).reshape(-1, 3)
    owner = np.full(len(X), -1)
    for tol in (1e-12, 1e-9):
        for r in scene.regions:   # lowest index first: ties go to the lowest region
            A = np.array([N for N, _ in r.halfspaces])
            b = np.array([dd for _, dd in r.halfspaces])
            inside = np.all(X @ A.T <= b + tol, axis=1) & (owner < 0)
            owner[inside] = r.index
    if np.any(owner < 0):
        raise InvalidInput(f"sample {X[np.argmax(owner < 0)]} lies outside every region")
    Y = np.empty_like(X)
    for r in scene.regions:
        sel = owner == r.index
        Y[sel] = r.map(X[sel])
    labels = [scene.regions[i].label for i in owner]
    return X, Y, labels


def point_cloud_csv(Y, labels) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "z", "label"])
    for y, lab in zip(Y, labels):
        w.writerow([f"{v:.9g}" for v in y] + [lab])
    return buf.getvalue()
