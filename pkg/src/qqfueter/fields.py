"""Quaternion-valued test fields with exact partial derivatives.

Fields eat frame coordinates: an (N, 4) block of points expressed in
the basis of some structural set, and return (N, 4) quaternion
components in the standard basis.  Every shipped field knows its exact
partials, so operator identities can be checked without finite
differences; a finite-difference cross-check of those partials is part
of the test suite, not of the field itself.

Component j of a field with respect to a frame is the real projection
<f, psi_j>; the weight constructors downstream need to know when that
component, restricted to one coordinate axis, is a plain monomial, so
polynomial fields expose that structurally.
"""

from __future__ import annotations

import numpy as np

from .errors import MissingExactPartial
from .geometry import Box4
from .kernel import kernel_partial, kernel_value
from .quaternion import ONE, Quaternion, StructuralSet, qmul

_COEFF_TOL = 1e-13


class QuaternionField:
    """Base class: a map from frame coordinates to quaternion values."""

    name: str = "field"
    degree: int | None = None
    box: Box4 | None = None
    psi: StructuralSet | None = None

    def value(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def partial(self, axis: int, pts: np.ndarray) -> np.ndarray:
        raise MissingExactPartial(f"field {self.name!r} provides no exact partials")

    def component(self, j: int, pts: np.ndarray, psi: StructuralSet) -> np.ndarray:
        return np.asarray(self.value(pts), dtype=float) @ psi.vectors[j]

    def component_partial(self, j: int, axis: int, pts: np.ndarray, psi: StructuralSet) -> np.ndarray:
        return np.asarray(self.partial(axis, pts), dtype=float) @ psi.vectors[j]

    def slice_monomial_degree(self, j: int, axis: int, psi: StructuralSet) -> int | None:
        """Power n when component j depends on x_axis as c * x_axis^n, else None."""
        return None

    def at(self, x: Quaternion, psi: StructuralSet) -> Quaternion:
        """Evaluate at a quaternion point (converted to frame coordinates)."""
        coords = psi.to_coords(x.as_array())
        return Quaternion.from_array(self.value(coords[None, :])[0])

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} degree={self.degree}>"


def as_callable(field: QuaternionField, psi: StructuralSet):
    """Adapt a field to a Quaternion -> Quaternion callable."""

    def fn(x: Quaternion) -> Quaternion:
        return field.at(x, psi)

    return fn


class ConstantField(QuaternionField):
    def __init__(self, coeff, name: str = "const", box: Box4 | None = None):
        self.coeff = coeff.as_array() if isinstance(coeff, Quaternion) else np.asarray(coeff, dtype=float)
        self.name = name
        self.degree = 0
        self.box = box

    def value(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.broadcast_to(self.coeff, pts.shape[:-1] + (4,)).copy()

    def partial(self, axis, pts):
        pts = np.asarray(pts, dtype=float)
        return np.zeros(pts.shape[:-1] + (4,))

    def slice_monomial_degree(self, j, axis, psi):
        return 0


class PolynomialField(QuaternionField):
    """sum_alpha c_alpha * x^alpha with quaternion coefficients.

    ``terms`` maps 4-tuples of exponents to coefficient quaternions.
    Coordinates are real and commute, so the only ordering that matters
    is inside the coefficients themselves.
    """

    def __init__(self, terms: dict, name: str = "poly", box: Box4 | None = None):
        self.terms = {}
        for alpha, c in terms.items():
            c = c.as_array() if isinstance(c, Quaternion) else np.asarray(c, dtype=float)
            if np.max(np.abs(c)) > 0.0:
                self.terms[tuple(int(a) for a in alpha)] = c
        self.name = name
        self.degree = max((sum(a) for a in self.terms), default=0)
        self.box = box
        self._dterms = [self._differentiate(k) for k in range(4)]

    def _differentiate(self, axis):
        out = {}
        for alpha, c in self.terms.items():
            if alpha[axis] == 0:
                continue
            beta = list(alpha)
            beta[axis] -= 1
            key = tuple(beta)
            contrib = alpha[axis] * c
            out[key] = out.get(key, 0.0) + contrib
        return out

    @staticmethod
    def _eval_terms(terms, pts):
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[:-1] + (4,))
        for alpha, c in terms.items():
            mono = np.ones(pts.shape[:-1])
            for k in range(4):
                if alpha[k]:
                    mono = mono * pts[..., k] ** alpha[k]
            out += mono[..., None] * c
        return out

    def value(self, pts):
        return self._eval_terms(self.terms, pts)

    def partial(self, axis, pts):
        return self._eval_terms(self._dterms[axis], pts)

    def slice_monomial_degree(self, j, axis, psi):
        powers = set()
        for alpha, c in self.terms.items():
            if abs(float(c @ psi.vectors[j])) > _COEFF_TOL * np.max(np.abs(c)):
                powers.add(alpha[axis])
        if len(powers) == 1:
            return powers.pop()
        return None if powers else 0


class ExpAxisField(QuaternionField):
    """c * exp(rate * x_axis): smooth, non-polynomial, single-axis."""

    def __init__(self, axis: int, rate: float, coeff=ONE, name: str | None = None,
                 box: Box4 | None = None):
        self.axis = int(axis)
        self.rate = float(rate)
        self.coeff = coeff.as_array() if isinstance(coeff, Quaternion) else np.asarray(coeff, dtype=float)
        self.name = name or f"exp-axis{axis}"
        self.degree = None
        self.box = box

    def value(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.exp(self.rate * pts[..., self.axis])[..., None] * self.coeff

    def partial(self, axis, pts):
        pts = np.asarray(pts, dtype=float)
        if axis != self.axis:
            return np.zeros(pts.shape[:-1] + (4,))
        return self.rate * self.value(pts)

    def slice_monomial_degree(self, j, axis, psi):
        return 0 if axis != self.axis else None


class KernelPoleField(QuaternionField):
    """The Cauchy kernel anchored at a fixed pole (kept outside the box)."""

    def __init__(self, pole, psi: StructuralSet, name: str = "cauchy-pole",
                 box: Box4 | None = None):
        self.pole = np.asarray(pole, dtype=float).reshape(4)
        self.psi = psi
        self.name = name
        self.degree = None
        self.box = box

    def value(self, pts):
        return kernel_value(np.asarray(pts, dtype=float) - self.pole, self.psi)

    def partial(self, axis, pts):
        return kernel_partial(axis, np.asarray(pts, dtype=float) - self.pole, self.psi)


# ---------------------------------------------------------------------------
# constructors


def _unit_index(k: int) -> tuple:
    alpha = [0, 0, 0, 0]
    alpha[k] = 1
    return tuple(alpha)


def poly_mul(t1: dict, t2: dict) -> dict:
    """Product of coefficient dictionaries; coefficients multiply in order."""
    out: dict = {}
    for a1, c1 in t1.items():
        for a2, c2 in t2.items():
            key = tuple(x + y for x, y in zip(a1, a2))
            contrib = qmul(c1, c2)
            out[key] = out.get(key, np.zeros(4)) + contrib
    return out


def identity_field(psi: StructuralSet, box: Box4 | None = None) -> PolynomialField:
    """f(x) = x, written out in the frame: sum_k x_k psi_k."""
    terms = {_unit_index(k): psi.vectors[k].copy() for k in range(4)}
    f = PolynomialField(terms, name="identity", box=box)
    f.psi = psi
    return f


def power_field(psi: StructuralSet, n: int, box: Box4 | None = None) -> PolynomialField:
    """f(x) = x^n as a coordinate polynomial with quaternion coefficients."""
    terms = {(0, 0, 0, 0): np.array([1.0, 0.0, 0.0, 0.0])}
    ident = {_unit_index(k): psi.vectors[k].copy() for k in range(4)}
    for _ in range(n):
        terms = poly_mul(terms, ident)
    names = {1: "identity", 2: "square", 3: "cube"}
    f = PolynomialField(terms, name=names.get(n, f"power-{n}"), box=box)
    f.psi = psi
    return f


def fueter_variable(psi: StructuralSet, k: int, box: Box4 | None = None) -> PolynomialField:
    """The degree-one null field x_k - psi_k x_0."""
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2, or 3")
    terms = {
        _unit_index(k): np.array([1.0, 0.0, 0.0, 0.0]),
        _unit_index(0): -psi.vectors[k],
    }
    f = PolynomialField(terms, name=f"fueter-{k}", box=box)
    f.psi = psi
    return f


def monomial_field(powers, coeff=ONE, name: str | None = None, box: Box4 | None = None) -> PolynomialField:
    powers = tuple(int(p) for p in powers)
    c = coeff.as_array() if isinstance(coeff, Quaternion) else np.asarray(coeff, dtype=float)
    label = name or "monomial-" + "".join(str(p) for p in powers)
    return PolynomialField({powers: c}, name=label, box=box)


def scale_field(field: PolynomialField, factor: float, name: str | None = None) -> PolynomialField:
    terms = {a: factor * c for a, c in field.terms.items()}
    out = PolynomialField(terms, name=name or field.name, box=field.box)
    out.psi = field.psi
    return out


# ---------------------------------------------------------------------------
# frame Dirac (Fueter-type) operators from exact partials


def fueter_left(field: QuaternionField, psi: StructuralSet, pts: np.ndarray) -> np.ndarray:
    """sum_k psi_k d_k f at the given points."""
    out = None
    for k in range(4):
        term = qmul(psi.vectors[k], np.asarray(field.partial(k, pts), dtype=float))
        out = term if out is None else out + term
    return out


def fueter_right(field: QuaternionField, psi: StructuralSet, pts: np.ndarray) -> np.ndarray:
    """sum_k (d_k f) psi_k at the given points."""
    out = None
    for k in range(4):
        term = qmul(np.asarray(field.partial(k, pts), dtype=float), psi.vectors[k])
        out = term if out is None else out + term
    return out


def finite_difference_partial(field: QuaternionField, axis: int, pts: np.ndarray, h: float) -> np.ndarray:
    """Central difference of the field value (test oracle for partials)."""
    pts = np.asarray(pts, dtype=float)
    up = pts.copy()
    dn = pts.copy()
    up[..., axis] += h
    dn[..., axis] -= h
    return (field.value(up) - field.value(dn)) / (2.0 * h)


# ---------------------------------------------------------------------------
# shipped catalog


def builtin_catalog(psi: StructuralSet, box: Box4) -> dict[str, QuaternionField]:
    """The shipped field families, keyed by name.

    Constants, low-degree powers of x, coordinate monomials, a field
    with strictly positive frame components on the positive orthant, a
    single-axis exponential, the degree-one null fields, and the Cauchy
    kernel with its pole parked outside the box.
    """
    e0 = np.array([1.0, 0.0, 0.0, 0.0])
    cat: dict[str, QuaternionField] = {}

    def add(field: QuaternionField):
        field.box = box
        if field.psi is None:
            field.psi = psi
        cat[field.name] = field

    add(ConstantField(e0, name="one"))
    add(ConstantField(np.array([0.5, -1.0, 0.25, -0.125]), name="const-q"))
    add(identity_field(psi))
    add(power_field(psi, 2))
    add(power_field(psi, 3))
    add(monomial_field((1, 1, 1, 0)))
    add(monomial_field((0, 2, 1, 0)))
    add(monomial_field((1, 2, 3, 4)))
    add(monomial_field((1, 2, 3, 4), coeff=np.array([0.5, -0.75, 0.25, 1.0]),
                       name="monomial-1234-q"))

    # strictly positive frame components on the positive orthant
    pos_terms = {
        (0, 0, 0, 0): 2.0 * psi.vectors[0] + 1.0 * psi.vectors[1]
        + 3.0 * psi.vectors[2] + 0.5 * psi.vectors[3],
        (1, 1, 0, 0): psi.vectors[0].copy(),
        (0, 0, 2, 0): psi.vectors[1].copy(),
        (1, 0, 0, 1): psi.vectors[2].copy(),
        (0, 1, 1, 0): psi.vectors[3].copy(),
    }
    pos = PolynomialField(pos_terms, name="positive-poly")
    pos.psi = psi
    add(pos)

    # steep enough that Gauss error is visible above roundoff at low orders
    add(ExpAxisField(axis=1, rate=3.0))
    for k in (1, 2, 3):
        add(fueter_variable(psi, k))

    pole = box.lo_arr - 0.75 * box.sides
    add(KernelPoleField(pole, psi))
    return cat


def polynomial_pairs(catalog: dict[str, QuaternionField], max_degree: int = 3):
    """All ordered (g, f) pairs of polynomial catalog fields up to a degree."""
    polys = [
        f
        for f in catalog.values()
        if f.degree is not None and f.degree <= max_degree
    ]
    return [(g, f) for g in polys for f in polys]
