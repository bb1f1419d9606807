"""Axis-aligned 4-D boxes, the boundary 3-form, and quadrature engines.

Volume and face integrals use composite tensor Gauss-Legendre rules.
All cell sums are produced in a fixed lexicographic order and combined
through an explicit pairwise reduction tree, so results are bitwise
reproducible no matter how the surrounding work is scheduled.

The boundary measure deserves a note.  The oriented 3-form carried by
the theory is -sgn(psi) * sum_k (-1)^k psi_k dxhat_k in the frame
coordinates.  Restricted to the outward face (k, side) of a coordinate
box, dxhat_k contributes sgn(psi) * (-1)^k * side times the plain face
measure, so the (-1)^k and the orientation of the frame both cancel and
a single global sign is left over.  That global sign is not fixed by
the definition alone; :func:`calibrate_sigma` pins it against an
exactly integrable case and freezes it for the whole run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import (
    CalibrationAmbiguous,
    NonFiniteSample,
    PoleTooCloseToBoundary,
)
from .quaternion import StructuralSet, STANDARD, qmul, qnorm

FACES = tuple((k, side) for k in range(4) for side in (-1, 1))


@dataclass(frozen=True)
class Box4:
    """Axis-aligned box [lo_0, hi_0] x ... x [lo_3, hi_3]."""

    lo: tuple[float, float, float, float]
    hi: tuple[float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        for k in range(4):
            if not self.lo[k] < self.hi[k]:
                raise ValueError(f"box axis {k}: need lo < hi, got {self.lo[k]} >= {self.hi[k]}")

    @property
    def lo_arr(self) -> np.ndarray:
        return np.array(self.lo)

    @property
    def hi_arr(self) -> np.ndarray:
        return np.array(self.hi)

    @property
    def sides(self) -> np.ndarray:
        return self.hi_arr - self.lo_arr

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.sides))

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo_arr + self.hi_arr)

    def contains(self, pts, margin: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        ok_lo = np.all(pts >= self.lo_arr + margin, axis=1)
        ok_hi = np.all(pts <= self.hi_arr - margin, axis=1)
        return ok_lo & ok_hi

    def wall_distance(self, pt) -> float:
        pt = np.asarray(pt, dtype=float)
        return float(min(np.min(pt - self.lo_arr), np.min(self.hi_arr - pt)))

    def core(self, fraction: float = 0.4) -> "Box4":
        """Centered sub-box spanning the given fraction of each side."""
        c, h = self.center, 0.5 * fraction * self.sides
        return Box4(tuple(c - h), tuple(c + h))


UNIT_BOX = Box4((0.0, 0.0, 0.0, 0.0), (1.0, 1.0, 1.0, 1.0))


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature configuration.

    ``epsilon`` is the exclusion radius of the singular rule, expressed
    relative to the box diameter; ``grading_ratio`` is the geometric
    shrink factor of the cells stacked toward the pole.
    """

    gauss_order: int = 8
    subdivisions: int = 2
    epsilon: float = 1e-2
    grading_ratio: float = 0.5
    sigma_calibration: int | None = None

    def __post_init__(self):
        if self.gauss_order < 2:
            raise ValueError("gauss_order must be at least 2")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if not (0.0 < self.grading_ratio < 1.0):
            raise ValueError("grading_ratio must lie in (0, 1)")
        if self.subdivisions < 1:
            raise ValueError("subdivisions must be at least 1")

    def with_order(self, order: int) -> "QuadSpec":
        return replace(self, gauss_order=order)

    def with_epsilon(self, epsilon: float) -> "QuadSpec":
        return replace(self, epsilon=epsilon)


@lru_cache(maxsize=None)
def gauss_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def pairwise_reduce(values):
    """Sum a sequence through a fixed binary tree (order-stable)."""
    vals = list(values)
    if not vals:
        return np.zeros(4)
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _axis_nodes(lo: float, hi: float, order: int, ncells: int):
    """Composite 1-D nodes/weights, concatenated cell by cell."""
    x, w = gauss_rule(order)
    edges = np.linspace(lo, hi, ncells + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    weights = (half[:, None] * w[None, :]).reshape(-1)
    return nodes, weights


def _check_finite(vals: np.ndarray, pts: np.ndarray):
    if not np.isfinite(vals).all():
        bad = np.argwhere(~np.isfinite(vals))[0][0]
        raise NonFiniteSample(pts[bad])


def box_cell_sums(fn, lo, hi, order: int, subdiv) -> list[np.ndarray]:
    """Per-cell quaternion integrals over a composite tensor grid.

    ``subdiv`` gives the number of equal cells per axis.  The returned
    list is ordered lexicographically by cell multi-index; the integrand
    is evaluated once on the full grid of the box.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    subdiv = tuple(int(s) for s in subdiv)
    per_axis = [_axis_nodes(lo[k], hi[k], order, subdiv[k]) for k in range(4)]
    grids = np.meshgrid(*[p[0] for p in per_axis], indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=-1)
    wgrids = np.meshgrid(*[p[1] for p in per_axis], indexing="ij")
    wts = wgrids[0].reshape(-1) * wgrids[1].reshape(-1) * wgrids[2].reshape(-1) * wgrids[3].reshape(-1)

    vals = np.asarray(fn(pts), dtype=float)
    _check_finite(vals, pts)
    weighted = wts[:, None] * vals
    shape = (
        subdiv[0], order, subdiv[1], order, subdiv[2], order, subdiv[3], order, 4,
    )
    cell_sums = weighted.reshape(shape).sum(axis=(1, 3, 5, 7))
    return [c for c in cell_sums.reshape(-1, 4)]


def volume_integral(fn, box: Box4, spec: QuadSpec) -> np.ndarray:
    """Integral of a quaternion-valued integrand over the box."""
    sums = box_cell_sums(fn, box.lo_arr, box.hi_arr, spec.gauss_order, (spec.subdivisions,) * 4)
    return pairwise_reduce(sums)


# ---------------------------------------------------------------------------
# boundary form and face integrals


@dataclass(frozen=True)
class SigmaForm:
    """Calibrated realization of the boundary 3-form on box faces.

    ``face_weight`` returns the quaternion multiplied between the two
    integrand factors on face (k, side), against the plain Lebesgue
    measure of the face (see the module docstring for the bookkeeping
    that collapses to the single calibrated sign).
    """

    sign: int

    def face_weight(self, psi: StructuralSet, k: int, side: int) -> np.ndarray:
        return self.sign * side * (-1.0) * psi.vectors[k]


_CALIBRATION: dict[str, SigmaForm] = {}


def face_nodes(box: Box4, k: int, side: int, order: int, subdiv: int):
    """Tensor nodes/weights on one face; returns (pts, wts, cells, nodes_per_cell)."""
    axes = [a for a in range(4) if a != k]
    per_axis = [_axis_nodes(box.lo[a], box.hi[a], order, subdiv) for a in axes]
    grids = np.meshgrid(*[p[0] for p in per_axis], indexing="ij")
    flat = [g.reshape(-1) for g in grids]
    npts = flat[0].size
    pts = np.empty((npts, 4))
    pts[:, k] = box.hi[k] if side > 0 else box.lo[k]
    for a, col in zip(axes, flat):
        pts[:, a] = col
    wgrids = np.meshgrid(*[p[1] for p in per_axis], indexing="ij")
    wts = wgrids[0].reshape(-1) * wgrids[1].reshape(-1) * wgrids[2].reshape(-1)
    return pts, wts


def boundary_integral(
    g,
    f,
    box: Box4,
    psi: StructuralSet,
    spec: QuadSpec,
    sigma: SigmaForm | None = None,
) -> np.ndarray:
    """Integral over the 8 box faces of g(x) * W(face) * f(x).

    ``g`` and ``f`` map (N, 4) frame coordinates to (N, 4) quaternion
    components; W is the calibrated face weight of the boundary form.
    """
    sigma = sigma or calibrate_sigma(spec)
    face_sums = []
    for k, side in FACES:
        pts, wts = face_nodes(box, k, side, spec.gauss_order, spec.subdivisions)
        w_quat = sigma.face_weight(psi, k, side)
        vals = qmul(qmul(np.asarray(g(pts), dtype=float), w_quat), np.asarray(f(pts), dtype=float))
        _check_finite(vals, pts)
        face_sums.append(pairwise_sum_rows(wts[:, None] * vals))
    return pairwise_reduce(face_sums)


def pairwise_sum_rows(arr: np.ndarray) -> np.ndarray:
    """Deterministic pairwise sum over the leading axis."""
    return np.sum(arr, axis=0)  # numpy reduces pairwise for fixed layout


def calibrate_sigma(spec: QuadSpec | None = None, force: bool = False) -> SigmaForm:
    """Fix the global boundary-form sign against an exact test case.

    The calibration pair is g = 1, f = identity on the unit box with the
    standard frame; both sides of the surface/volume identity integrate
    exactly, so exactly one sign choice reproduces the identity and the
    other misses by a fixed nonzero amount.  The result is cached and
    reused by every subsequent boundary integral.
    """
    if "sigma" in _CALIBRATION and not force:
        return _CALIBRATION["sigma"]
    spec = spec or QuadSpec()
    psi = STANDARD
    box = UNIT_BOX

    def g_one(pts):
        out = np.zeros((pts.shape[0], 4))
        out[:, 0] = 1.0
        return out

    def f_ident(pts):
        return np.asarray(pts, dtype=float).copy()

    # volume side: g * (sum_k psi_k d_k f) + (sum_k d_k g psi_k) * f = -2
    def volume_integrand(pts):
        out = np.zeros((pts.shape[0], 4))
        out[:, 0] = -2.0
        return out

    rhs = volume_integral(volume_integrand, box, spec)
    residuals = {}
    for s in (1, -1):
        sigma = SigmaForm(sign=s)
        lhs = boundary_integral(g_one, f_ident, box, psi, spec, sigma=sigma)
        residuals[s] = float(qnorm(lhs - rhs))
    best = min(residuals, key=residuals.get)
    worst = -best
    if residuals[best] > 1e-10 or residuals[worst] < 0.1:
        raise CalibrationAmbiguous(
            f"surface-form calibration residuals {residuals} admit no clear sign"
        )
    _CALIBRATION["sigma"] = SigmaForm(sign=best)
    return _CALIBRATION["sigma"]


def reset_sigma_calibration():
    """Drop the cached calibration (test hook)."""
    _CALIBRATION.pop("sigma", None)


# ---------------------------------------------------------------------------
# graded singular quadrature


def _box_minus_box(lo, hi, ilo, ihi):
    """Slabs covering [lo, hi] minus the inner box, in fixed axis order.

    Returns (slab_lo, slab_hi, thin_axis) triples; the inner box must be
    strictly inside.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    ilo = np.asarray(ilo, dtype=float)
    ihi = np.asarray(ihi, dtype=float)
    slabs = []
    for a in range(4):
        if ilo[a] > lo[a]:
            s_lo, s_hi = lo.copy(), hi.copy()
            s_hi[a] = ilo[a]
            slabs.append((s_lo, s_hi, a))
        if ihi[a] < hi[a]:
            s_lo, s_hi = lo.copy(), hi.copy()
            s_lo[a] = ihi[a]
            slabs.append((s_lo, s_hi, a))
        lo[a], hi[a] = ilo[a], ihi[a]
    return slabs


def singular_volume_integral(fn, box: Box4, pole, spec: QuadSpec) -> np.ndarray:
    """Integral over the box minus a graded neighborhood of the pole.

    Cells shrink geometrically toward the pole; the final cube inscribed
    in the exclusion ball of radius epsilon*diameter is dropped.  For a
    kernel growing like r^-3 the truncated mass is O(epsilon); when the
    integrand is odd about the pole the symmetric exclusion cancels the
    leading term and the truncation behaves like O(epsilon^2).
    """
    pole = np.asarray(pole, dtype=float).reshape(4)
    eps = spec.epsilon * box.diameter
    dmin = box.wall_distance(pole)
    if dmin <= 0:
        raise PoleTooCloseToBoundary("pole must lie strictly inside the box")
    if dmin < 4.0 * eps:
        raise PoleTooCloseToBoundary(
            f"pole at wall distance {dmin:.3e} violates the 4*epsilon={4 * eps:.3e} margin"
        )

    cell_sums: list[np.ndarray] = []

    def add_slabs(slabs, transverse_subdiv: int):
        for s_lo, s_hi, thin in slabs:
            subdiv = tuple(1 if a == thin else transverse_subdiv for a in range(4))
            cell_sums.extend(box_cell_sums(fn, s_lo, s_hi, spec.gauss_order, subdiv))

    h = spec.grading_ratio * dmin
    add_slabs(
        _box_minus_box(box.lo_arr, box.hi_arr, pole - h, pole + h),
        spec.subdivisions,
    )
    while 2.0 * h > eps:
        hn = spec.grading_ratio * h
        add_slabs(_box_minus_box(pole - h, pole + h, pole - hn, pole + hn), spec.subdivisions)
        h = hn
    # remaining cube of half-width h (corner distance 2h <= eps) is dropped
    return pairwise_reduce(cell_sums)


# ---------------------------------------------------------------------------
# small shared utilities


def halton_points(n: int, skip: int = 20) -> np.ndarray:
    """First n points of the 4-D Halton sequence (bases 2, 3, 5, 7)."""

    def van_der_corput(i: int, base: int) -> float:
        out, denom = 0.0, 1.0
        while i > 0:
            i, rem = divmod(i, base)
            denom *= base
            out += rem / denom
        return out

    bases = (2, 3, 5, 7)
    return np.array(
        [[van_der_corput(i + skip, b) for b in bases] for i in range(1, n + 1)]
    )


def fit_order(params, residuals) -> float:
    """Least-squares slope of log(residual) against log(parameter)."""
    x = np.log(np.asarray(params, dtype=float))
    y = np.log(np.maximum(np.asarray(residuals, dtype=float), 1e-300))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
