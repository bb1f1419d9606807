"""Quaternion arithmetic, orthonormal 4-frames, and coordinate maps.

Two representations coexist on purpose.  The frozen :class:`Quaternion`
dataclass is the convenient scalar type used in tests and at API
boundaries.  The quadrature hot paths work on plain ndarrays whose last
axis holds the four components in the standard basis {1, e1, e2, e3};
the vectorized helpers (:func:`qmul`, :func:`qconj`, ...) operate on
those and broadcast like any numpy ufunc.

Multiplication follows the usual table e1*e2 = e3, e2*e3 = e1,
e3*e1 = e2 with anticommuting imaginary units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotOrthonormal

ORTHONORMALITY_TOL = 1e-12
_INVERTIBILITY_FLOOR = 1e-300


# ---------------------------------------------------------------------------
# vectorized helpers on (..., 4) arrays


def qmul(a, b):
    """Hamilton product of component arrays of shape (..., 4)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b0, b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(a):
    """Quaternion conjugate: negate the three imaginary components."""
    a = np.asarray(a, dtype=float)
    out = a.copy()
    out[..., 1:] = -out[..., 1:]
    return out


def qnorm_sq(a):
    a = np.asarray(a, dtype=float)
    return np.sum(a * a, axis=-1)


def qnorm(a):
    return np.sqrt(qnorm_sq(a))


def qinv(a):
    """Inverse conj(a)/|a|^2; raises ZeroDivisionError on non-invertible input."""
    a = np.asarray(a, dtype=float)
    nsq = qnorm_sq(a)
    if np.any(nsq < _INVERTIBILITY_FLOOR):
        raise ZeroDivisionError("quaternion norm below invertibility floor")
    return qconj(a) / nsq[..., None]


def qdot(a, b):
    """Euclidean inner product of quaternions viewed as 4-vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.sum(a * b, axis=-1)


# ---------------------------------------------------------------------------
# scalar type


@dataclass(frozen=True)
class Quaternion:
    """One quaternion c0 + c1*e1 + c2*e2 + c3*e3."""

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        arr = np.asarray(arr, dtype=float).reshape(4)
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2, self.c3])

    # -- algebra ----------------------------------------------------------
    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2, self.c3 + other.c3
        )

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.c0 - other.c0, self.c1 - other.c1, self.c2 - other.c2, self.c3 - other.c3
        )

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.c0, -self.c1, -self.c2, -self.c3)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self.as_array(), other.as_array()))
        return Quaternion(self.c0 * other, self.c1 * other, self.c2 * other, self.c3 * other)

    def __rmul__(self, scalar):
        return Quaternion(self.c0 * scalar, self.c1 * scalar, self.c2 * scalar, self.c3 * scalar)

    def __truediv__(self, scalar):
        return Quaternion(self.c0 / scalar, self.c1 / scalar, self.c2 / scalar, self.c3 / scalar)

    def conj(self) -> "Quaternion":
        return Quaternion(self.c0, -self.c1, -self.c2, -self.c3)

    def norm_sq(self) -> float:
        return self.c0 * self.c0 + self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    __abs__ = norm

    def inverse(self) -> "Quaternion":
        nsq = self.norm_sq()
        if nsq < _INVERTIBILITY_FLOOR:
            raise ZeroDivisionError("quaternion norm below invertibility floor")
        return self.conj() / nsq


ZERO = Quaternion()
ONE = Quaternion(1.0)
E1 = Quaternion(0.0, 1.0)
E2 = Quaternion(0.0, 0.0, 1.0)
E3 = Quaternion(0.0, 0.0, 0.0, 1.0)


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product of two scalar quaternions."""
    return a * b


def conj(a: Quaternion) -> Quaternion:
    return a.conj()


def norm_sq(a: Quaternion) -> float:
    return a.norm_sq()


def inverse(a: Quaternion) -> Quaternion:
    return a.inverse()


# ---------------------------------------------------------------------------
# determinant by explicit cofactor expansion (fixed 4x4, no solver)


def _det3(m) -> float:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def det4(m) -> float:
    """Determinant of a 4x4 matrix via cofactor expansion on the first row."""
    m = np.asarray(m, dtype=float)
    total = 0.0
    sign = 1.0
    for j in range(4):
        cols = [c for c in range(4) if c != j]
        minor = m[1:][:, cols]
        total += sign * m[0, j] * _det3(minor)
        sign = -sign
    return total


# ---------------------------------------------------------------------------
# structural sets


@dataclass(frozen=True, eq=False)
class StructuralSet:
    """An orthonormal quaternion 4-frame with its orientation sign.

    ``vectors[k]`` holds the standard-basis components of the k-th frame
    quaternion.  Coordinates of x in the frame are ``<x, psi_k>``; the
    frame being orthonormal makes the round trip exact up to rounding.
    """

    vectors: np.ndarray  # (4, 4), row k = components of psi_k
    sign: int

    def psi(self, k: int) -> Quaternion:
        return Quaternion.from_array(self.vectors[k])

    def to_coords(self, x):
        """Coordinates of x (Quaternion or (..., 4) array) in this frame."""
        arr = x.as_array() if isinstance(x, Quaternion) else np.asarray(x, dtype=float)
        return arr @ self.vectors.T

    def from_coords(self, c):
        """Quaternion components for frame coordinates c of shape (..., 4)."""
        return np.asarray(c, dtype=float) @ self.vectors

    def from_coords_q(self, c) -> Quaternion:
        return Quaternion.from_array(self.from_coords(c))

    def pair_products(self) -> np.ndarray:
        """All products psi_k * psi_j as a (4, 4, 4) table (k, j, component)."""
        out = np.empty((4, 4, 4))
        for k in range(4):
            for j in range(4):
                out[k, j] = qmul(self.vectors[k], self.vectors[j])
        return out

    def is_standard(self) -> bool:
        return bool(np.array_equal(self.vectors, np.eye(4)))


def validate_structural_set(psis, tol: float = ORTHONORMALITY_TOL) -> StructuralSet:
    """Check orthonormality of four quaternions and compute the orientation.

    Raises :class:`NotOrthonormal` naming the first offending pair.  The
    orientation sign is the sign of the determinant of the component
    matrix (+1 when the frame is oriented like {1, e1, e2, e3}).
    """
    rows = []
    for p in psis:
        rows.append(p.as_array() if isinstance(p, Quaternion) else np.asarray(p, dtype=float))
    mat = np.array(rows, dtype=float)
    if mat.shape != (4, 4):
        raise NotOrthonormal(0, 0, float("nan"))
    gram = mat @ mat.T
    for k in range(4):
        for m in range(k, 4):
            expected = 1.0 if k == m else 0.0
            if abs(gram[k, m] - expected) > tol:
                raise NotOrthonormal(k, m, float(gram[k, m]))
    d = det4(mat)
    return StructuralSet(vectors=mat, sign=1 if d > 0 else -1)


STANDARD = validate_structural_set([ONE, E1, E2, E3])


def gram_schmidt(rows: np.ndarray) -> np.ndarray:
    """Orthonormalize the rows of a 4x4 matrix (with re-orthogonalization)."""
    rows = np.asarray(rows, dtype=float).copy()
    out = np.zeros_like(rows)
    for k in range(4):
        v = rows[k]
        for _ in range(2):  # second pass stabilizes nearly dependent input
            for m in range(k):
                v = v - np.dot(v, out[m]) * out[m]
        n = np.linalg.norm(v)
        if n < 1e-8:
            raise ValueError("input rows nearly linearly dependent")
        out[k] = v / n
    return out


def random_structural_set(rng: np.random.Generator, first: Quaternion | None = None) -> StructuralSet:
    """Random orthonormal frame via Gram-Schmidt on random quaternions.

    When ``first`` is given, the frame is built around it (it must be a
    unit quaternion); pass ``ONE`` to sample frames whose first element
    is the real unit.
    """
    while True:
        m = rng.standard_normal((4, 4))
        if first is not None:
            m[0] = first.as_array()
        try:
            q = gram_schmidt(m)
        except ValueError:
            continue
        return validate_structural_set(q)
