"""Cubic point group, the 12 monoclinic variants, and the domain-system census.

Variant indices are 1-based and follow the usual listing (U1 ... U12), so
pair labels can be compared directly with published tables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg3 as la
from .errors import DegenerateVariants, NotCompatible
from .twinning import DomainPair, StretchTensor, as_stretch, classify_domain, recover_axes


@dataclass(frozen=True)
class GroupElement:
    Q: np.ndarray
    angle: int                 # degrees, in {0, 90, 120, 180}
    axis: tuple | None         # smallest integer triple, first nonzero positive; None for identity

    def label(self) -> str:
        if self.axis is None:
            return "identity"
        return f"{self.angle}°[{','.join(str(c) for c in self.axis)}]"


@dataclass(frozen=True)
class PointGroup:
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def matrices(self):
        return [g.Q for g in self.elements]

    def find(self, angle, axis):
        ax = _int_axis(np.asarray(axis, float))
        for g in self.elements:
            if g.angle == angle and g.axis == ax:
                return g
        return None


def _int_axis(v):
    v = la.canonical_axis(v)
    for s in (1, 2, 3):
        w = v / np.max(np.abs(v)) * s
        if np.allclose(w, np.round(w), atol=1e-9):
            w = np.round(w).astype(int)
            g = np.gcd.reduce(np.abs(w[w != 0]))
            return tuple(int(c) for c in w // g)
    raise ValueError(f"axis {v} is not a low-index lattice direction")


def tag_rotation(Q):
    ang, ax = la.angle_axis(Q)
    deg = int(round(np.degrees(ang)))
    if deg == 0:
        return 0, None
    return deg, _int_axis(ax)


def cubic_point_group() -> PointGroup:
    """The 24 proper rotations of the cube (signed permutation matrices with det +1)."""
    els = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            Q = np.zeros((3, 3))
            for i, (j, s) in enumerate(zip(perm, signs)):
                Q[i, j] = s
            if np.linalg.det(Q) > 0:
                ang, ax = tag_rotation(Q)
                els.append(GroupElement(Q=Q, angle=ang, axis=ax))
    els.sort(key=lambda g: (g.angle, g.axis or ()))
    return PointGroup(tuple(els))


@dataclass(frozen=True)
class VariantSet:
    variants: tuple            # StretchTensor, position k holds U_{k+1}
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.variants)

    def __getitem__(self, i):
        """1-based access: ``vs[1]`` is U1."""
        return self.variants[i - 1]

    def matrices(self):
        return [v.U for v in self.variants]

    def index_of(self, U, tol=1e-10):
        for k, v in enumerate(self.variants, start=1):
            if np.max(np.abs(v.U - U)) <= tol:
                return k
        return None


def monoclinic_variants(alpha, beta, gamma, delta) -> VariantSet:
    a, b, g, d = float(alpha), float(beta), float(gamma), float(delta)
    mats = [
        [[a, b, 0], [b, d, 0], [0, 0, g]],
        [[a, -b, 0], [-b, d, 0], [0, 0, g]],
        [[d, b, 0], [b, a, 0], [0, 0, g]],
        [[d, -b, 0], [-b, a, 0], [0, 0, g]],
        [[g, 0, 0], [0, d, b], [0, b, a]],
        [[g, 0, 0], [0, d, -b], [0, -b, a]],
        [[a, 0, b], [0, g, 0], [b, 0, d]],
        [[a, 0, -b], [0, g, 0], [-b, 0, d]],
        [[d, 0, b], [0, g, 0], [b, 0, a]],
        [[d, 0, -b], [0, g, 0], [-b, 0, a]],
        [[g, 0, 0], [0, a, b], [0, b, d]],
        [[g, 0, 0], [0, a, -b], [0, -b, d]],
    ]
    if abs(a - d) < 1e-12:
        raise DegenerateVariants("alpha = delta: variants coincide in pairs")
    U1 = np.array(mats[0], float)
    vals = np.linalg.eigvalsh(U1)
    if vals[0] <= 0:
        raise DegenerateVariants("U1 is not positive-definite")
    if np.min(np.diff(vals)) < 1e-10:
        raise DegenerateVariants("U1 has a repeated eigenvalue")
    vs = tuple(StretchTensor.from_matrix(m) for m in mats)
    return VariantSet(vs, dict(alpha=a, beta=b, gamma=g, delta=d))


def variant_permutation(variants: VariantSet, Q) -> tuple:
    """pi with Q U_k Q^T = U_pi(k) (1-based), or raise if Q does not permute the set."""
    out = []
    for U in variants.matrices():
        k = variants.index_of(Q @ U @ Q.T)
        if k is None:
            raise NotCompatible("group element does not permute the variant set")
        out.append(k)
    return tuple(out)


@dataclass(frozen=True)
class DomainSystem:
    pair: tuple                # (i, j), i < j, 1-based
    angle: int                 # relating rotation with U_i = R U_j R^T
    axis: tuple
    axes: tuple                # two-fold axes ê (unit vectors) recovered for the pair
    kind: DomainPair
    class_id: int = -1

    @property
    def conventional(self) -> bool:
        """Related by a 180° rotation that belongs to the group (a twin rather than a domain)."""
        return self.angle == 180


def _pair_orbits(pairs, variants, group):
    perms = [variant_permutation(variants, g.Q) for g in group]
    cls = {}
    cid = 0
    for p in sorted(pairs):
        if p in cls:
            continue
        for pi in perms:
            q = tuple(sorted((pi[p[0] - 1], pi[p[1] - 1])))
            if q in pairs and q not in cls:
                cls[q] = cid
        cid += 1
    return cls


def enumerate_domains(variants: VariantSet, group: PointGroup | None = None) -> list:
    """One DomainSystem per (compatible pair, relating group rotation)."""
    group = cubic_point_group() if group is None else group
    mats = variants.matrices()
    found = []
    for i, j in itertools.combinations(range(1, len(mats) + 1), 2):
        Ui, Uj = variants[i], variants[j]
        try:
            rec = recover_axes(Ui, Uj)
        except NotCompatible:
            continue
        if rec.equal or not rec.axes:
            continue
        kind = classify_domain(Ui, rec.axes[0])
        rots = set()
        for g in group:
            if g.axis is not None and np.max(np.abs(g.Q @ Uj.U @ g.Q.T - Ui.U)) < 1e-10:
                rots.add((g.angle, g.axis))
        for ang, ax in sorted(rots):
            found.append(DomainSystem(pair=(i, j), angle=ang, axis=ax, axes=tuple(rec.axes), kind=kind))
    cls = _pair_orbits({d.pair for d in found}, variants, group)
    return [DomainSystem(d.pair, d.angle, d.axis, d.axes, d.kind, cls[d.pair]) for d in found]


def cc_equivalence_classes(domains, variants: VariantSet, group: PointGroup | None = None) -> list:
    """Partition of the compatible pairs into orbits of the group action.

    Returns a list of sorted pair lists; members of one class have identical
    cofactor residuals because the group acts by rotations.
    """
    group = cubic_point_group() if group is None else group
    pairs = {d.pair for d in domains}
    cls = _pair_orbits(pairs, variants, group)
    out = {}
    for p, c in cls.items():
        out.setdefault(c, []).append(p)
    return [sorted(v) for _, v in sorted(out.items())]


def domain_census(domains) -> dict:
    """Counts of twins and domains by type.

    A Type I/II pair yields one Type I and one Type II solution, a compound pair
    two compound solutions.  A pair counts as a twin when some relating
    rotation is a 180° group element and as a domain when some relating
    rotation is not.
    """
    twin_pairs = {pd: set() for pd in DomainPair}
    dom_pairs = {pd: set() for pd in DomainPair}
    for d in domains:
        (twin_pairs if d.conventional else dom_pairs)[d.kind].add(d.pair)
    t12, tc = len(twin_pairs[DomainPair.TYPE_I_II]), len(twin_pairs[DomainPair.COMPOUND])
    d12, dc = len(dom_pairs[DomainPair.TYPE_I_II]), len(dom_pairs[DomainPair.COMPOUND])
    return {
        "Type I twins": t12, "Type II twins": t12, "Compound twins": 2 * tc,
        "Type I domains": d12, "Type II domains": d12, "Compound domains": 2 * dc,
    }


def table_rows(domains) -> dict:
    """{(angle, axis): {"Type I/II": set of pairs, "Compound": set of pairs}}."""
    rows = {}
    for d in domains:
        r = rows.setdefault((d.angle, d.axis), {DomainPair.TYPE_I_II.value: set(), DomainPair.COMPOUND.value: set()})
        r[d.kind.value].add(d.pair)
    return rows
