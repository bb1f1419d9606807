"""Exponential weight exponents and the weighted slice transforms.

The deformed operator identities trade the classical product rule for
exponential weights: along each axis k a real function lambda(x_k)
solves lambda'(x_k) * h = (deformed partial of h) - (classical partial
of h) on the slice through the base point w.  For a component that is a
plain monomial c * x_k^n the solution is ([n] - n) * log(x_k / a_k)
anchored at the lower box corner; anything else is integrated by an
adaptive 1-D rule.  The slice transforms sum the field over axis slices
against exp(lambda); their frame derivatives are what the integral
identities downstream compare.

Two granularities exist side by side: one weight per axis for a whole
field (requires the correction ratio to be real), and one weight per
(component, axis) pair, which only needs the real component to stay
away from zero on the segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ComponentVanishes, HypothesisViolated
from .fields import QuaternionField
from .geometry import Box4
from .qqcalc import EvalFrame, QQPair, QQVector, deformed_partial, qq_number
from .quaternion import StructuralSet, qinv, qmul, qnorm

_SEGMENT_SAMPLES = 33
_ZERO_COMPONENT_TOL = 1e-12
_REALNESS_TOL = 1e-10
_QUAD_ABS_TOL = 1e-12


class WeightExponent:
    """A real exponent lambda(x_k) with its exact derivative, anchored so
    that lambda(anchor) = 0."""

    kind: str = "closed_form"

    def __init__(self, axis: int, anchor: float):
        self.axis = int(axis)
        self.anchor = float(anchor)

    def lam(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dlam(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def exp_lam(self, t: np.ndarray) -> np.ndarray:
        return np.exp(self.lam(t))

    def shifted(self, offset: float) -> "WeightExponent":
        return ShiftedWeight(self, offset)


class ZeroWeight(WeightExponent):
    """lambda == 0; also the stand-in for identically zero components."""

    def lam(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def dlam(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


class LogPowerWeight(WeightExponent):
    """lambda = coef * log(t / anchor), the closed form for monomials."""

    def __init__(self, axis: int, anchor: float, coef: float):
        super().__init__(axis, anchor)
        self.coef = float(coef)

    def lam(self, t):
        return self.coef * np.log(np.asarray(t, dtype=float) / self.anchor)

    def dlam(self, t):
        return self.coef / np.asarray(t, dtype=float)


class QuadWeight(WeightExponent):
    """lambda integrated from its defining ratio by adaptive quadrature."""

    kind = "quadrature_1d"

    def __init__(self, axis: int, anchor: float, ratio):
        super().__init__(axis, anchor)
        self._ratio = ratio
        self._cache: dict[float, float] = {float(anchor): 0.0}

    def _lam_scalar(self, t: float) -> float:
        t = float(t)
        if t in self._cache:
            return self._cache[t]
        # integrate from the nearest cached abscissa to keep segments short
        nearest = min(self._cache, key=lambda s: abs(s - t))
        val, _ = quad(self._ratio, nearest, t, epsabs=_QUAD_ABS_TOL, limit=200)
        out = self._cache[nearest] + val
        self._cache[t] = out
        return out

    def lam(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        out = np.array([self._lam_scalar(v) for v in flat])
        return out.reshape(t.shape)

    def dlam(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        out = np.array([self._ratio(v) for v in flat])
        return out.reshape(t.shape)


class ShiftedWeight(WeightExponent):
    """lambda + constant; the identities are invariant under this shift."""

    def __init__(self, base: WeightExponent, offset: float):
        super().__init__(base.axis, base.anchor)
        self.kind = base.kind
        self.base = base
        self.offset = float(offset)

    def lam(self, t):
        return self.base.lam(t) + self.offset

    def dlam(self, t):
        return self.base.dlam(t)


# ---------------------------------------------------------------------------
# builders


def _segment(box: Box4, axis: int, n: int = _SEGMENT_SAMPLES) -> np.ndarray:
    return np.linspace(box.lo[axis], box.hi[axis], n)


def _slice_pts(w: np.ndarray, axis: int, ts: np.ndarray) -> np.ndarray:
    pts = np.broadcast_to(np.asarray(w, dtype=float), (ts.size, 4)).copy()
    pts[:, axis] = ts
    return pts


def component_axis_weight(
    field: QuaternionField,
    j: int,
    axis: int,
    pair: QQPair,
    w,
    box: Box4,
    psi: StructuralSet,
) -> WeightExponent:
    """Weight for frame component j along one axis, anchored at the lower corner.

    An identically zero component gets the zero weight (any exponent
    solves 0 = 0); a component that merely crosses zero on the segment
    is rejected, because the defining ratio blows up there.
    """
    w = np.asarray(w, dtype=float).reshape(4)
    anchor = box.lo[axis]
    ts = _segment(box, axis)
    pts = _slice_pts(w, axis, ts)
    comp = field.component(j, pts, psi)
    scale = max(1.0, float(np.max(np.abs(field.value(pts)))))
    if np.max(np.abs(comp)) <= _ZERO_COMPONENT_TOL * scale:
        return ZeroWeight(axis, anchor)
    small = np.abs(comp) <= _ZERO_COMPONENT_TOL * scale
    if np.any(small) or np.min(comp) < 0.0 < np.max(comp):
        idx = int(np.argmin(np.abs(comp)))
        raise ComponentVanishes(j, axis, float(ts[idx]), float(comp[idx]))

    n = field.slice_monomial_degree(j, axis, psi)
    if n is not None:
        return LogPowerWeight(axis, anchor, qq_number(n, pair) - float(n))

    def ratio(t: float) -> float:
        pt = _slice_pts(w, axis, np.array([t]))
        frame = EvalFrame(w=w, x=pt)
        deformed = deformed_partial(field, axis, pair, frame)[0]
        classical = field.partial(axis, pt)[0]
        c = float(field.component(j, pt, psi)[0])
        num = float((deformed - classical) @ psi.vectors[j])
        return num / c

    return QuadWeight(axis, anchor, ratio)


def field_axis_weight(
    field: QuaternionField,
    axis: int,
    pair: QQPair,
    w,
    box: Box4,
    psi: StructuralSet,
) -> WeightExponent:
    """One weight for the whole field along one axis.

    Exists only when (deformed - classical partial) * f^{-1} is real on
    the segment; the sampled imaginary mass is the certificate and its
    violation is reported with the worst offender.
    """
    w = np.asarray(w, dtype=float).reshape(4)
    anchor = box.lo[axis]
    ts = _segment(box, axis)
    pts = _slice_pts(w, axis, ts)
    vals = np.asarray(field.value(pts), dtype=float)
    scale = max(1.0, float(np.max(np.abs(vals))))
    norms = np.sqrt(np.sum(vals * vals, axis=-1))
    if np.max(norms) <= _ZERO_COMPONENT_TOL * scale:
        return ZeroWeight(axis, anchor)
    if np.any(norms <= _ZERO_COMPONENT_TOL * scale):
        idx = int(np.argmin(norms))
        raise ComponentVanishes(-1, axis, float(ts[idx]), float(norms[idx]))

    frame = EvalFrame(w=w, x=pts)
    deformed = deformed_partial(field, axis, pair, frame)
    classical = field.partial(axis, pts)
    ratio_q = qmul(deformed - classical, qinv(vals))
    imag = float(np.max(np.abs(ratio_q[:, 1:])))
    if imag > _REALNESS_TOL * max(1.0, float(np.max(np.abs(ratio_q)))):
        raise HypothesisViolated(imag, detail=f"axis {axis} correction ratio not real")

    # uniform monomial dependence across the live components: closed form
    live_degrees = set()
    for j in range(4):
        if np.max(np.abs(field.component(j, pts, psi))) > _ZERO_COMPONENT_TOL * scale:
            live_degrees.add(field.slice_monomial_degree(j, axis, psi))
    if len(live_degrees) == 1 and None not in live_degrees:
        n = live_degrees.pop()
        return LogPowerWeight(axis, anchor, qq_number(n, pair) - float(n))

    def ratio(t: float) -> float:
        pt = _slice_pts(w, axis, np.array([t]))
        fr = EvalFrame(w=w, x=pt)
        deformed_t = deformed_partial(field, axis, pair, fr)
        classical_t = field.partial(axis, pt)
        rq = qmul(deformed_t - classical_t, qinv(np.asarray(field.value(pt), dtype=float)))
        return float(rq[0, 0])

    return QuadWeight(axis, anchor, ratio)


def field_weights(field, qq: QQVector, w, box: Box4, psi: StructuralSet) -> list[WeightExponent]:
    return [field_axis_weight(field, k, qq.pairs[k], w, box, psi) for k in range(4)]


def component_weights(field, qq: QQVector, w, box: Box4, psi: StructuralSet) -> list[list[WeightExponent]]:
    """weights[j][k] for every (component, axis) pair."""
    return [
        [component_axis_weight(field, j, k, qq.pairs[k], w, box, psi) for k in range(4)]
        for j in range(4)
    ]


def shift_component_weights(weights, offsets) -> list[list[WeightExponent]]:
    """Anchor-shift every (j, k) weight by a constant (invariance hook)."""
    return [
        [weights[j][k].shifted(float(offsets[j][k])) for k in range(4)]
        for j in range(4)
    ]


# ---------------------------------------------------------------------------
# weighted slice transforms


def slice_transform(field, weights: list[WeightExponent], w, pts, psi: StructuralSet) -> np.ndarray:
    """sum_k f(w_0, ..., x_k, ..., w_3) * exp(lambda_k(x_k))."""
    w = np.asarray(w, dtype=float).reshape(4)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = np.zeros((pts.shape[0], 4))
    for k in range(4):
        sl = np.broadcast_to(w, pts.shape).copy()
        sl[:, k] = pts[:, k]
        out += np.asarray(field.value(sl), dtype=float) * weights[k].exp_lam(pts[:, k])[:, None]
    return out


def slice_transform_fueter_left(field, weights, w, pts, psi: StructuralSet) -> np.ndarray:
    """Exact left frame derivative of the slice transform.

    Term k depends on x_k alone, so only the k-th partial acts on it:
    psi_k [d_k f + lambda_k' f] e^{lambda_k}, summed over k.
    """
    w = np.asarray(w, dtype=float).reshape(4)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = np.zeros((pts.shape[0], 4))
    for k in range(4):
        sl = np.broadcast_to(w, pts.shape).copy()
        sl[:, k] = pts[:, k]
        inner = (
            np.asarray(field.partial(k, sl), dtype=float)
            + weights[k].dlam(pts[:, k])[:, None] * np.asarray(field.value(sl), dtype=float)
        )
        out += qmul(psi.vectors[k], inner) * weights[k].exp_lam(pts[:, k])[:, None]
    return out


def component_slice_transform(field, weights, w, pts, psi: StructuralSet) -> np.ndarray:
    """sum_{j,k} psi_j f_j(w_0, ..., x_k, ..., w_3) exp(lambda_{j,k}(x_k))."""
    w = np.asarray(w, dtype=float).reshape(4)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = np.zeros((pts.shape[0], 4))
    for k in range(4):
        sl = np.broadcast_to(w, pts.shape).copy()
        sl[:, k] = pts[:, k]
        vals = np.asarray(field.value(sl), dtype=float)
        comps = vals @ psi.vectors.T  # (N, 4): component j at column j
        for j in range(4):
            out += (comps[:, j] * weights[j][k].exp_lam(pts[:, k]))[:, None] * psi.vectors[j]
    return out


def component_slice_fueter(field, weights, w, pts, psi: StructuralSet, side: str = "left") -> np.ndarray:
    """Exact frame derivative of the component slice transform.

    The (j, k) term depends on x_k alone; differentiating it gives
    psi_k psi_j (left) or psi_j psi_k (right) times the scalar
    [d_k f_j + lambda'_{j,k} f_j] e^{lambda_{j,k}}.
    """
    w = np.asarray(w, dtype=float).reshape(4)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    prods = psi.pair_products()
    out = np.zeros((pts.shape[0], 4))
    for k in range(4):
        sl = np.broadcast_to(w, pts.shape).copy()
        sl[:, k] = pts[:, k]
        vals = np.asarray(field.value(sl), dtype=float) @ psi.vectors.T
        dvals = np.asarray(field.partial(k, sl), dtype=float) @ psi.vectors.T
        for j in range(4):
            scalar = (dvals[:, j] + weights[j][k].dlam(pts[:, k]) * vals[:, j]) * weights[j][k].exp_lam(pts[:, k])
            coeff = prods[k, j] if side == "left" else prods[j, k]
            out += scalar[:, None] * coeff
    return out


# ---------------------------------------------------------------------------
# conservative-weight instances for the whole-point-scaling derivative


@dataclass
class ScalarField:
    """Real scalar field with exact gradient (weight exponents on the box)."""

    fn: object
    grad: object

    def value(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self.fn(pts), dtype=float)

    def gradient(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self.grad(pts), dtype=float)

    @classmethod
    def constant(cls, c: float = 0.0) -> "ScalarField":
        return cls(
            fn=lambda pts: np.full(pts.shape[0], float(c)),
            grad=lambda pts: np.zeros((pts.shape[0], 4)),
        )


def scaling_derivative(field, pair: QQPair, pts, psi: StructuralSet, side: str = "left") -> np.ndarray:
    """Whole-point-scaling difference quotient at a batch of points.

    left:  [f(q x) - f(q' x)] [(q - q') x]^{-1}
    right: [(q - q') x]^{-1} [f(q x) - f(q' x)]
    Scaling the quaternion scales its frame coordinates, so both are
    vectorized directly on coordinates.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    diff = np.asarray(field.value(pair.q * pts), dtype=float) - np.asarray(
        field.value(pair.qp * pts), dtype=float
    )
    x_q = pts @ psi.vectors
    inv = qinv(pair.span * x_q)
    return qmul(diff, inv) if side == "left" else qmul(inv, diff)


@dataclass
class WeightedFieldInstance:
    """A field paired with the scalar exponent that gauges its scaling
    derivative into the frame operator.

    The hypothesis is that the correction B with B*f = (scaling
    derivative of f) - (frame derivative of f) is a gradient field,
    realized as the frame derivative of the exponent.  ``certify``
    samples that identity; instances failing their certificate are
    reported as skipped, never silently accepted.
    """

    field: QuaternionField
    exponent: ScalarField
    pair: QQPair
    side: str = "left"

    @classmethod
    def constant(cls, field: QuaternionField, pair: QQPair, side: str = "left") -> "WeightedFieldInstance":
        return cls(field=field, exponent=ScalarField.constant(0.0), pair=pair, side=side)

    def certificate_residual(self, pts, psi: StructuralSet) -> float:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        from .fields import fueter_left, fueter_right  # local to avoid cycle noise

        grad = self.exponent.gradient(pts)
        vals = np.asarray(self.field.value(pts), dtype=float)
        # the correction field: frame derivative of the real exponent
        b = np.zeros((pts.shape[0], 4))
        for k in range(4):
            b += grad[:, k][:, None] * psi.vectors[k]
        if self.side == "left":
            lhs = qmul(b, vals)
            rhs = scaling_derivative(self.field, self.pair, pts, psi, "left") - fueter_left(
                self.field, psi, pts
            )
        else:
            lhs = qmul(vals, b)
            rhs = scaling_derivative(self.field, self.pair, pts, psi, "right") - fueter_right(
                self.field, psi, pts
            )
        return float(np.max(qnorm(lhs - rhs)))

    def certify(self, pts, psi: StructuralSet, tol: float = 1e-10) -> float:
        res = self.certificate_residual(pts, psi)
        if res > tol:
            raise HypothesisViolated(res, detail=f"conservative-weight certificate ({self.side})")
        return res
