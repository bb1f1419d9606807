"""Two-parameter difference operators and the deformed Fueter operators.

The scalar difference quotient (f(qx) - f(q'x)) / ((q - q')x) replaces
the ordinary derivative; its quaternionic versions multiply the
difference by the inverse of (q - q')x on the right (left family) or on
the left (right family).  The deformed partial derivatives act one axis
at a time on a slice through a base point w: all coordinates except the
active one are frozen at w.  Summing them against a frame gives the
deformed Fueter operators.

Everything here is a pure function of immutable inputs; the batch
entries accept an (N, 4) block of active points and return (N, 4)
component arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    InvalidDeformation,
    MissingExactPartial,
    RequiresDerivativeAtZero,
    SingularPoint,
)
from .quaternion import Quaternion, StructuralSet, qmul

DEFAULT_ZERO_COORD_REL_TOL = 1e-8


@dataclass(frozen=True)
class QQPair:
    """Deformation parameters with 0 < qp < q <= 1 enforced at construction.

    Symmetric and other historical variants that swap or exceed this
    range are rejected rather than silently accepted; the swap symmetry
    of the difference quotients is exercised at the function level.
    """

    q: float
    qp: float

    def __post_init__(self):
        if not (0.0 < self.qp < self.q <= 1.0):
            raise InvalidDeformation(
                f"require 0 < q' < q <= 1, got q={self.q}, q'={self.qp}"
            )

    @property
    def span(self) -> float:
        return self.q - self.qp


@dataclass(frozen=True)
class QQVector:
    """Per-axis deformation pairs (q_k, q'_k), k = 0..3."""

    pairs: tuple[QQPair, QQPair, QQPair, QQPair]

    def __post_init__(self):
        if len(self.pairs) != 4:
            raise InvalidDeformation("need exactly four per-axis pairs")

    @classmethod
    def uniform(cls, q: float, qp: float) -> "QQVector":
        p = QQPair(q, qp)
        return cls((p, p, p, p))

    @classmethod
    def from_flat(cls, values) -> "QQVector":
        vals = [float(v) for v in values]
        if len(vals) != 8:
            raise InvalidDeformation("expected 8 values: q0..q3 then q'0..q'3")
        return cls(tuple(QQPair(vals[k], vals[4 + k]) for k in range(4)))


@dataclass
class EvalFrame:
    """Base point w and active point(s) x, both in frame coordinates.

    ``x`` may be a single point (4,) or a batch (N, 4); operators return
    values with the matching leading shape.
    """

    w: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float).reshape(4)
        self.x = np.asarray(self.x, dtype=float)

    @classmethod
    def diagonal(cls, x) -> "EvalFrame":
        x = np.asarray(x, dtype=float).reshape(4)
        return cls(w=x, x=x)


def qq_number(n: int, pair: QQPair) -> float:
    """The deformed integer [n] = (q^n - q'^n)/(q - q') = sum q^i q'^(n-1-i)."""
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    total = 0.0
    for i in range(n):
        total += pair.q**i * pair.qp ** (n - 1 - i)
    return total


def scalar_qq_derivative(
    f: Callable[[float], float],
    pair: QQPair,
    x: float,
    derivative_at_zero: float | None = None,
) -> float:
    """Difference quotient (f(qx) - f(q'x)) / ((q - q')x).

    At x = 0 the quotient degenerates; the classical derivative f'(0)
    must then be supplied and is returned as the limit value.
    """
    if x == 0.0:
        if derivative_at_zero is None:
            raise RequiresDerivativeAtZero("supply f'(0) to evaluate at x = 0")
        return derivative_at_zero
    return (f(pair.q * x) - f(pair.qp * x)) / (pair.span * x)


def quat_qq_derivative_left(
    f: Callable[[Quaternion], Quaternion],
    pair: QQPair,
    x: Quaternion,
    limit_at_zero: Quaternion | None = None,
) -> Quaternion:
    """[f(qx) - f(q'x)] * [(q - q')x]^{-1} (right-multiplied inverse)."""
    if x.norm_sq() < 1e-280:
        if limit_at_zero is None:
            raise SingularPoint("left difference quotient undefined at x = 0")
        return limit_at_zero
    diff = f(pair.q * x) - f(pair.qp * x)
    return diff * (pair.span * x).inverse()


def quat_qq_derivative_right(
    f: Callable[[Quaternion], Quaternion],
    pair: QQPair,
    x: Quaternion,
    limit_at_zero: Quaternion | None = None,
) -> Quaternion:
    """[(q - q')x]^{-1} * [f(qx) - f(q'x)] (left-multiplied inverse)."""
    if x.norm_sq() < 1e-280:
        if limit_at_zero is None:
            raise SingularPoint("right difference quotient undefined at x = 0")
        return limit_at_zero
    diff = f(pair.q * x) - f(pair.qp * x)
    return (pair.span * x).inverse() * diff


# ---------------------------------------------------------------------------
# deformed partial derivatives and Fueter operators


def _slice_points(w: np.ndarray, x: np.ndarray, axis: int) -> np.ndarray:
    """Points (w_0, ..., x_axis, ..., w_3) for a batch of active points."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    pts = np.broadcast_to(w, x.shape).copy()
    pts[:, axis] = x[:, axis]
    return pts


def _zero_threshold(field, zero_tol: float | None) -> float:
    if zero_tol is not None:
        return zero_tol
    box = getattr(field, "box", None)
    scale = box.diameter if box is not None else 1.0
    return DEFAULT_ZERO_COORD_REL_TOL * scale


def deformed_partial(
    field,
    axis: int,
    pair: QQPair,
    frame: EvalFrame,
    zero_tol: float | None = None,
) -> np.ndarray:
    """Axis-k difference quotient of a field on the slice through frame.w.

    Returns quaternion components with the leading shape of ``frame.x``.
    Where |x_k| falls below the zero threshold the quotient is replaced
    by the exact classical partial at the slice point (the limit value);
    fields without exact partials raise MissingExactPartial there.
    """
    single = np.asarray(frame.x).ndim == 1
    base = _slice_points(frame.w, frame.x, axis)
    xk = base[:, axis]
    delta = _zero_threshold(field, zero_tol)
    small = np.abs(xk) <= delta

    up = base.copy()
    dn = base.copy()
    up[:, axis] = pair.q * xk
    dn[:, axis] = pair.qp * xk
    num = field.value(up) - field.value(dn)
    den = np.where(small, 1.0, pair.span * xk)
    out = num / den[:, None]
    if np.any(small):
        try:
            out[small] = field.partial(axis, base[small])
        except MissingExactPartial as exc:
            raise MissingExactPartial(
                f"axis {axis}: coordinate below zero threshold {delta:.3e} "
                f"and field {getattr(field, 'name', field)!r} has no exact partial"
            ) from exc
    return out[0] if single else out


def deformed_fueter_left(
    field,
    qq: QQVector,
    psi: StructuralSet,
    frame: EvalFrame,
    zero_tol: float | None = None,
) -> np.ndarray:
    """Sum_k psi_k * (axis-k difference quotient) at the frame."""
    out = None
    for k in range(4):
        term = qmul(psi.vectors[k], deformed_partial(field, k, qq.pairs[k], frame, zero_tol))
        out = term if out is None else out + term
    return out


def deformed_fueter_right(
    field,
    qq: QQVector,
    psi: StructuralSet,
    frame: EvalFrame,
    zero_tol: float | None = None,
) -> np.ndarray:
    """Sum_k (axis-k difference quotient) * psi_k at the frame."""
    out = None
    for k in range(4):
        term = qmul(deformed_partial(field, k, qq.pairs[k], frame, zero_tol), psi.vectors[k])
        out = term if out is None else out + term
    return out


def deformed_fueter_square(
    field,
    qq: QQVector,
    psi: StructuralSet,
    frame: EvalFrame,
) -> np.ndarray:
    """Second application of the deformed operator along each axis.

    With the slice convention, applying the operator twice kills every
    mixed term (the axis-k quotient is constant in the other active
    coordinates), leaving sum_k psi_k^2 * (second axis-k quotient).
    """
    single = np.asarray(frame.x).ndim == 1
    x = np.atleast_2d(np.asarray(frame.x, dtype=float))
    out = np.zeros_like(x)
    for k in range(4):
        pair = qq.pairs[k]
        xk = x[:, k]

        def first_quotient(t: np.ndarray) -> np.ndarray:
            pts = np.broadcast_to(frame.w, x.shape).copy()
            pts[:, k] = t
            sub = EvalFrame(w=frame.w, x=pts)
            return deformed_partial(field, k, pair, sub)

        num = first_quotient(pair.q * xk) - first_quotient(pair.qp * xk)
        quot = num / (pair.span * xk)[:, None]
        psi_sq = qmul(psi.vectors[k], psi.vectors[k])
        out = out + qmul(psi_sq, quot)
    return out[0] if single else out
