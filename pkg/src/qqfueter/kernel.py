"""The Cauchy kernel of the frame Dirac operators and its exact partials.

K(y) = conj(y_psi) / (2 pi^2 |y|^4), where y is the displacement in
frame coordinates and y_psi the quaternion it represents.  The kernel
is odd, homogeneous of degree -3, and annihilated by both the left and
the right frame operator away from the pole; the closed-form partials
make those residuals vanish to rounding, so downstream integral checks
measure quadrature error only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleHit
from .quaternion import Quaternion, StructuralSet, qconj, qmul, qnorm

KERNEL_CONST = 1.0 / (2.0 * np.pi**2)
_POLE_REL_TOL = 1e-12


def kernel_value(y, psi: StructuralSet) -> np.ndarray:
    """Kernel components for displacements y of shape (..., 4)."""
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1)
    if np.any(r2 <= 0.0):
        raise PoleHit("zero displacement passed to the kernel")
    y_q = y @ psi.vectors
    return KERNEL_CONST * qconj(y_q) / (r2 * r2)[..., None]


def kernel_partial(axis: int, y, psi: StructuralSet) -> np.ndarray:
    """Exact partial of the kernel along a frame coordinate.

    d_k [conj(y_psi)/|y|^4] = conj(psi_k)/|y|^4 - 4 y_k conj(y_psi)/|y|^6,
    scaled by the kernel constant.
    """
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1)
    if np.any(r2 <= 0.0):
        raise PoleHit("zero displacement passed to the kernel")
    y_q = y @ psi.vectors
    r4 = r2 * r2
    term1 = qconj(psi.vectors[axis]) / r4[..., None]
    term2 = 4.0 * y[..., axis, None] * qconj(y_q) / (r4 * r2)[..., None]
    return KERNEL_CONST * (term1 - term2)


@dataclass(frozen=True)
class KernelEval:
    """Kernel value and its four exact partials at one displacement."""

    value: Quaternion
    partials: tuple[Quaternion, Quaternion, Quaternion, Quaternion]


def kernel(tau, x, psi: StructuralSet) -> KernelEval:
    """Kernel of the displacement tau - x (both in frame coordinates)."""
    tau = np.asarray(tau, dtype=float).reshape(4)
    x = np.asarray(x, dtype=float).reshape(4)
    y = tau - x
    scale = 1.0 + float(np.linalg.norm(tau)) + float(np.linalg.norm(x))
    if np.linalg.norm(y) < _POLE_REL_TOL * scale:
        raise PoleHit(f"evaluation point within {_POLE_REL_TOL:g}*scale of the pole")
    value = Quaternion.from_array(kernel_value(y, psi))
    partials = tuple(Quaternion.from_array(kernel_partial(k, y, psi)) for k in range(4))
    return KernelEval(value=value, partials=partials)


def hyperholomorphy_residual(x, pole, psi: StructuralSet, side: str = "left") -> float:
    """|sum_k psi_k d_k K| (or the right-sided mirror) at x, pole fixed.

    Uses the exact partials; away from the pole the result is zero up to
    rounding for both operator sides.
    """
    x = np.asarray(x, dtype=float).reshape(4)
    pole = np.asarray(pole, dtype=float).reshape(4)
    y = x - pole
    scale = 1.0 + float(np.linalg.norm(x)) + float(np.linalg.norm(pole))
    if np.linalg.norm(y) < _POLE_REL_TOL * scale:
        raise PoleHit("residual requested at the pole")
    total = np.zeros(4)
    for k in range(4):
        dk = kernel_partial(k, y, psi)
        if side == "left":
            total = total + qmul(psi.vectors[k], dk)
        elif side == "right":
            total = total + qmul(dk, psi.vectors[k])
        else:
            raise ValueError("side must be 'left' or 'right'")
    return float(qnorm(total))
