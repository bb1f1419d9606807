import numpy as np
import pytest

from qqfueter.errors import ComponentVanishes, HypothesisViolated
from qqfueter.fields import (
    ConstantField,
    PolynomialField,
    builtin_catalog,
    identity_field,
    monomial_field,
    power_field,
)
from qqfueter.geometry import Box4
from qqfueter.qqcalc import EvalFrame, QQPair, QQVector, deformed_partial, qq_number
from qqfueter.quaternion import ONE, Quaternion, STANDARD, qnorm
from qqfueter.weights import (
    ScalarField,
    WeightedFieldInstance,
    component_axis_weight,
    component_slice_transform,
    component_weights,
    field_axis_weight,
    field_weights,
    scaling_derivative,
    shift_component_weights,
    slice_transform,
)

BOX = Box4((1.0, 1.0, 1.0, 1.0), (2.0, 2.0, 2.0, 2.0))
PAIR = QQPair(0.9, 0.5)
QQ = QQVector.uniform(0.9, 0.5)
W = np.array([1.3, 1.5, 1.2, 1.8])


@pytest.fixture(scope="module")
def catalog():
    return builtin_catalog(STANDARD, BOX)


class TestComponentAxisWeight:
    def test_linear_component_gives_zero_weight(self):
        f = monomial_field((0, 1, 0, 0), box=BOX)
        wgt = component_axis_weight(f, 0, 1, PAIR, W, BOX, STANDARD)
        ts = np.linspace(1.0, 2.0, 9)
        assert np.max(np.abs(wgt.lam(ts))) == 0.0

    def test_square_closed_form(self):
        # f_0 = x_1^2 with anchor 1: coefficient [2] - 2 = q + q' - 2
        f = monomial_field((0, 2, 0, 0), box=BOX)
        wgt = component_axis_weight(f, 0, 1, PAIR, W, BOX, STANDARD)
        assert wgt.kind == "closed_form"
        ts = np.linspace(1.0, 2.0, 9)
        expected = (PAIR.q + PAIR.qp - 2.0) * np.log(ts)
        assert np.max(np.abs(wgt.lam(ts) - expected)) <= 1e-14

    def test_quadrature_matches_closed_form(self):
        # hide the monomial structure behind a generic field wrapper
        base = monomial_field((0, 3, 0, 0), box=BOX)

        class Opaque(PolynomialField):
            def slice_monomial_degree(self, j, axis, psi):
                return None

        f = Opaque(base.terms, name="opaque", box=BOX)
        wgt = component_axis_weight(f, 0, 1, PAIR, W, BOX, STANDARD)
        assert wgt.kind == "quadrature_1d"
        ts = np.linspace(1.0, 2.0, 7)
        expected = (qq_number(3, PAIR) - 3.0) * np.log(ts)
        assert np.max(np.abs(wgt.lam(ts) - expected)) <= 1e-10

    def test_zero_component_gets_zero_weight(self):
        f = monomial_field((0, 2, 0, 0), box=BOX)  # scalar-valued: component 2 is zero
        wgt = component_axis_weight(f, 2, 1, PAIR, W, BOX, STANDARD)
        assert np.max(np.abs(wgt.lam(np.linspace(1, 2, 5)))) == 0.0

    def test_sign_crossing_rejected(self):
        # component 0 = x_1 - 1.5 crosses zero inside the segment
        f = PolynomialField(
            {(0, 1, 0, 0): np.array([1.0, 0, 0, 0]), (0, 0, 0, 0): np.array([-1.5, 0, 0, 0])},
            box=BOX,
        )
        with pytest.raises(ComponentVanishes):
            component_axis_weight(f, 0, 1, PAIR, W, BOX, STANDARD)

    def test_defining_relation_sampled(self, catalog):
        # lambda' * f_j = deformed partial - classical partial at 32 points
        f = catalog["monomial-1234-q"]
        for j in range(4):
            for axis in range(4):
                wgt = component_axis_weight(f, j, axis, QQ.pairs[axis], W, BOX, STANDARD)
                ts = np.linspace(1.02, 1.98, 32)
                pts = np.broadcast_to(W, (32, 4)).copy()
                pts[:, axis] = ts
                comp = f.component(j, pts, STANDARD)
                deformed = deformed_partial(f, axis, QQ.pairs[axis], EvalFrame(W, pts))
                classical = f.partial(axis, pts)
                target = (deformed - classical) @ STANDARD.vectors[j]
                got = wgt.dlam(ts) * comp
                assert np.max(np.abs(got - target)) <= 1e-8 * max(1.0, np.max(np.abs(target)))


class TestFieldAxisWeight:
    def test_monomial_family_closed_form(self):
        c = Quaternion(0.5, -0.75, 0.25, 1.0)
        f = monomial_field((1, 2, 3, 4), coeff=c, box=BOX)
        for axis, n in enumerate((1, 2, 3, 4)):
            wgt = field_axis_weight(f, axis, QQ.pairs[axis], W, BOX, STANDARD)
            ts = np.linspace(1.0, 2.0, 5)
            expected = (qq_number(n, QQ.pairs[axis]) - n) * np.log(ts)
            assert np.max(np.abs(wgt.lam(ts) - expected)) <= 1e-12

    def test_constant_gives_zero(self):
        f = ConstantField(np.array([2.0, 1.0, 0.0, -1.0]), box=BOX)
        wgt = field_axis_weight(f, 2, PAIR, W, BOX, STANDARD)
        assert np.max(np.abs(wgt.lam(np.linspace(1, 2, 5)))) == 0.0

    def test_identity_field_affine_slice_gives_zero(self):
        # the deformed partial of an affine slice equals the classical
        # one, so the correction ratio vanishes identically
        f = identity_field(STANDARD, box=BOX)
        wgt = field_axis_weight(f, 2, PAIR, W, BOX, STANDARD)
        assert np.max(np.abs(wgt.lam(np.linspace(1, 2, 5)))) <= 1e-12

    def test_square_field_violates_realness(self):
        f = power_field(STANDARD, 2, box=BOX)
        with pytest.raises(HypothesisViolated):
            field_axis_weight(f, 2, PAIR, W, BOX, STANDARD)


class TestSliceTransforms:
    def test_zero_weights_diagonal_quadruples(self, catalog):
        f = catalog["const-q"]
        weights = field_weights(f, QQ, W, BOX, STANDARD)
        out = slice_transform(f, weights, W, W[None], STANDARD)[0]
        assert np.allclose(out, 4.0 * f.value(W[None])[0], atol=1e-14)

    def test_monomial_closed_form_value(self):
        f = monomial_field((1, 2, 3, 4), box=BOX)
        weights = field_weights(f, QQ, W, BOX, STANDARD)
        x = np.array([1.4, 1.7, 1.3, 1.9])
        out = slice_transform(f, weights, W, x[None], STANDARD)[0]
        expected = np.zeros(4)
        powers = (1, 2, 3, 4)
        for k in range(4):
            sl = W.copy()
            sl[k] = x[k]
            factor = (x[k] / BOX.lo[k]) ** (qq_number(powers[k], QQ.pairs[k]) - powers[k])
            expected += f.value(sl[None])[0] * factor
        assert np.max(np.abs(out - expected)) <= 1e-12 * max(1.0, np.max(np.abs(expected)))

    def test_component_transform_single_component(self):
        f = ConstantField(np.array([1.0, 0, 0, 0]), box=BOX)
        weights = component_weights(f, QQ, W, BOX, STANDARD)
        out = component_slice_transform(f, weights, W, W[None], STANDARD)[0]
        assert np.allclose(out, [4.0, 0, 0, 0], atol=1e-14)

    def test_component_transform_null_field(self, catalog):
        f = catalog["fueter-1"]
        weights = component_weights(f, QQ, W, BOX, STANDARD)
        for row in weights:
            for wgt in row:
                assert np.max(np.abs(wgt.lam(np.linspace(1, 2, 5)))) == 0.0
        out = component_slice_transform(f, weights, W, W[None], STANDARD)[0]
        assert np.allclose(out, 4.0 * f.value(W[None])[0], atol=1e-13)

    def test_anchor_shift_scales_terms(self, catalog):
        f = catalog["monomial-1234-q"]
        weights = component_weights(f, QQ, W, BOX, STANDARD)
        offsets = [[0.1 * (j + k) for k in range(4)] for j in range(4)]
        shifted = shift_component_weights(weights, offsets)
        x = np.array([1.5, 1.6, 1.7, 1.8])
        for j in range(4):
            for k in range(4):
                base = weights[j][k].exp_lam(x[k:k + 1])[0]
                assert shifted[j][k].exp_lam(x[k:k + 1])[0] == pytest.approx(
                    base * np.exp(offsets[j][k]), rel=1e-14
                )


class TestWeightedInstances:
    def test_constant_instance_certifies(self, catalog):
        inst = WeightedFieldInstance.constant(catalog["const-q"], PAIR, side="left")
        pts = np.linspace(1.1, 1.9, 5)[:, None] * np.ones(4)
        assert inst.certify(pts, STANDARD) <= 1e-15

    def test_identity_instance_rejected(self, catalog):
        # scaling derivative of x is 1 but the frame derivative is -2;
        # a constant exponent cannot bridge that gap
        inst = WeightedFieldInstance.constant(catalog["identity"], PAIR, side="left")
        pts = np.linspace(1.1, 1.9, 5)[:, None] * np.ones(4)
        with pytest.raises(HypothesisViolated):
            inst.certify(pts, STANDARD)

    def test_scaling_derivative_constant_exact_zero(self, catalog):
        pts = np.linspace(1.1, 1.9, 5)[:, None] * np.ones(4)
        out = scaling_derivative(catalog["const-q"], PAIR, pts, STANDARD, side="left")
        assert np.max(qnorm(out)) == 0.0

    def test_scaling_derivative_identity_is_one(self, catalog):
        pts = np.array([[1.5, 1.2, 1.8, 1.4]])
        out = scaling_derivative(catalog["identity"], PAIR, pts, STANDARD, side="left")
        assert np.allclose(out[0], [1.0, 0, 0, 0], atol=1e-13)

    def test_scalar_field_constant(self):
        s = ScalarField.constant(2.5)
        pts = np.ones((3, 4))
        assert np.allclose(s.value(pts), 2.5)
        assert np.allclose(s.gradient(pts), 0.0)
