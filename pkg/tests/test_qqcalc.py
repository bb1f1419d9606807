import numpy as np
import pytest

from qqfueter.errors import (
    InvalidDeformation,
    MissingExactPartial,
    RequiresDerivativeAtZero,
    SingularPoint,
)
from qqfueter.fields import (
    ConstantField,
    PolynomialField,
    QuaternionField,
    fueter_variable,
    identity_field,
    monomial_field,
)
from qqfueter.qqcalc import (
    EvalFrame,
    QQPair,
    QQVector,
    deformed_fueter_left,
    deformed_fueter_right,
    deformed_fueter_square,
    deformed_partial,
    qq_number,
    quat_qq_derivative_left,
    quat_qq_derivative_right,
    scalar_qq_derivative,
)
from qqfueter.quaternion import ONE, Quaternion, STANDARD, random_structural_set

PAIR = QQPair(0.9, 0.5)


class TestQQPair:
    @pytest.mark.parametrize("q,qp", [(0.5, 0.9), (1.1, 0.5), (0.9, 0.9), (0.9, 0.0), (0.9, -0.1)])
    def test_rejects_bad_parameters(self, q, qp):
        with pytest.raises(InvalidDeformation):
            QQPair(q, qp)

    def test_q_equal_one_allowed(self):
        QQPair(1.0, 0.999)

    def test_vector_from_flat(self):
        qq = QQVector.from_flat([0.9, 0.9, 0.8, 0.7, 0.5, 0.4, 0.5, 0.3])
        assert qq.pairs[3] == QQPair(0.7, 0.3)
        with pytest.raises(InvalidDeformation):
            QQVector.from_flat([0.9] * 4)


class TestQQNumber:
    def test_zero_and_one(self):
        assert qq_number(0, PAIR) == 0.0
        assert qq_number(1, PAIR) == 1.0

    def test_two_is_sum(self):
        assert abs(qq_number(2, PAIR) - (PAIR.q + PAIR.qp)) < 1e-15

    def test_three_example(self):
        # (0.9^3 - 0.5^3) / 0.4 = 1.51
        assert abs(qq_number(3, PAIR) - 1.51) < 1e-14

    def test_matches_ratio_form(self):
        for n in range(7):
            ratio = (PAIR.q**n - PAIR.qp**n) / (PAIR.q - PAIR.qp)
            assert abs(qq_number(n, PAIR) - ratio) < 1e-13


class TestScalarDerivative:
    def test_square_closed_form(self):
        val = scalar_qq_derivative(lambda t: t * t, PAIR, 2.0)
        assert abs(val - (PAIR.q + PAIR.qp) * 2.0) < 1e-14

    def test_constant_and_linear(self):
        assert scalar_qq_derivative(lambda t: 7.0, PAIR, 1.3) == 0.0
        assert abs(scalar_qq_derivative(lambda t: t, PAIR, 1.3) - 1.0) < 1e-15

    def test_zero_requires_derivative(self):
        with pytest.raises(RequiresDerivativeAtZero):
            scalar_qq_derivative(lambda t: t * t, PAIR, 0.0)
        assert scalar_qq_derivative(lambda t: t * t, PAIR, 0.0, derivative_at_zero=0.0) == 0.0

    def test_swap_is_bitwise_stable(self):
        # numerator and denominator are exactly negated under q <-> q'
        def raw(q, qp, x):
            f = lambda t: np.sin(t) + t**3
            return (f(q * x) - f(qp * x)) / ((q - qp) * x)

        for x in (0.3, 1.7, -2.4):
            assert raw(0.9, 0.5, x) == raw(0.5, 0.9, x)


class TestQuatDerivatives:
    def test_identity_function(self, rng):
        x = Quaternion(*rng.normal(size=4))
        for op in (quat_qq_derivative_left, quat_qq_derivative_right):
            out = op(lambda t: t, PAIR, x)
            assert (out - ONE).norm() < 1e-14

    def test_constant(self, rng):
        x = Quaternion(*rng.normal(size=4))
        c = Quaternion(1.0, -2.0, 0.5, 3.0)
        for op in (quat_qq_derivative_left, quat_qq_derivative_right):
            assert op(lambda t: c, PAIR, x).norm() < 1e-15

    def test_norm_sq_closed_form(self, rng):
        # f = |x|^2 gives (q + q') conj(x)
        x = Quaternion(*rng.normal(size=4))
        out = quat_qq_derivative_left(lambda t: Quaternion(t.norm_sq()), PAIR, x)
        expected = (PAIR.q + PAIR.qp) * x.conj()
        assert (out - expected).norm() < 1e-13 * max(1.0, expected.norm())

    def test_singular_point(self):
        with pytest.raises(SingularPoint):
            quat_qq_derivative_left(lambda t: t, PAIR, Quaternion())
        out = quat_qq_derivative_left(lambda t: t, PAIR, Quaternion(), limit_at_zero=ONE)
        assert out == ONE

    def test_left_op_left_constants(self, rng):
        # the inverse sits on the right, so left constants pass through
        x = Quaternion(*rng.normal(size=4))
        c = Quaternion(0.3, -1.2, 0.7, 0.4)
        f = lambda t: t * t
        lhs = quat_qq_derivative_left(lambda t: c * f(t), PAIR, x)
        rhs = c * quat_qq_derivative_left(f, PAIR, x)
        assert (lhs - rhs).norm() <= 1e-13 * max(1.0, rhs.norm())

    def test_right_op_right_constants(self, rng):
        x = Quaternion(*rng.normal(size=4))
        c = Quaternion(0.3, -1.2, 0.7, 0.4)
        f = lambda t: t * t
        lhs = quat_qq_derivative_right(lambda t: f(t) * c, PAIR, x)
        rhs = quat_qq_derivative_right(f, PAIR, x) * c
        assert (lhs - rhs).norm() <= 1e-13 * max(1.0, rhs.norm())

    def test_conjugation_symmetry_squares(self, rng):
        # conj(right derivative of Z o f o Z) equals left derivative at conj(x)
        f = lambda t: t * t
        for _ in range(10):
            x = Quaternion(*rng.normal(size=4))
            zfz = lambda t: (f(t.conj())).conj()
            lhs = quat_qq_derivative_right(zfz, PAIR, x).conj()
            rhs = quat_qq_derivative_left(f, PAIR, x.conj())
            assert (lhs - rhs).norm() <= 1e-13 * max(1.0, rhs.norm())


class TestDeformedPartial:
    def test_monomial_eigenvalue(self):
        w = np.array([1.3, 1.5, 1.2, 1.8])
        for n in range(1, 7):
            f = monomial_field((0, n, 0, 0))
            frame = EvalFrame(w=w, x=np.array([1.3, 1.6, 1.2, 1.8]))
            out = deformed_partial(f, 1, PAIR, frame)
            expected = qq_number(n, PAIR) * 1.6 ** (n - 1)
            assert abs(out[0] - expected) <= 1e-13 * max(1.0, abs(expected))
            assert np.max(np.abs(out[1:])) < 1e-15

    def test_linear_coordinate(self):
        f = monomial_field((0, 0, 1, 0))
        frame = EvalFrame(w=np.ones(4), x=np.array([1.0, 1.0, 1.7, 1.0]))
        out = deformed_partial(f, 2, PAIR, frame)
        assert abs(out[0] - 1.0) < 1e-14

    def test_independent_axis_gives_zero(self):
        f = monomial_field((2, 0, 0, 0))
        frame = EvalFrame(w=np.ones(4), x=np.full(4, 1.5))
        out = deformed_partial(f, 3, PAIR, frame)
        assert np.max(np.abs(out)) < 1e-15

    def test_zero_coordinate_uses_exact_partial(self):
        f = monomial_field((0, 0, 2, 0))
        frame = EvalFrame(w=np.array([1.0, 1.0, 0.0, 1.0]), x=np.zeros(4))
        out = deformed_partial(f, 2, PAIR, frame, zero_tol=1e-8)
        # exact d/dx2 x2^2 = 2 x2 = 0 at the slice point
        assert np.max(np.abs(out)) == 0.0

    def test_zero_coordinate_without_partial_raises(self):
        class ValueOnly(QuaternionField):
            name = "value-only"

            def value(self, pts):
                pts = np.asarray(pts, dtype=float)
                out = np.zeros(pts.shape[:-1] + (4,))
                out[..., 0] = pts[..., 2] ** 2
                return out

        frame = EvalFrame(w=np.array([1.0, 1.0, 0.0, 1.0]), x=np.zeros(4))
        with pytest.raises(MissingExactPartial):
            deformed_partial(ValueOnly(), 2, PAIR, frame, zero_tol=1e-8)

    def test_batch_matches_single(self, rng):
        f = monomial_field((1, 2, 0, 1))
        w = np.array([1.2, 1.4, 1.6, 1.8])
        xs = rng.uniform(1.0, 2.0, size=(7, 4))
        batch = deformed_partial(f, 1, PAIR, EvalFrame(w=w, x=xs))
        for i in range(7):
            single = deformed_partial(f, 1, PAIR, EvalFrame(w=w, x=xs[i]))
            assert np.allclose(batch[i], single)

    def test_swap_invariance_bitwise(self):
        f = monomial_field((0, 3, 0, 0))
        w = np.array([1.2, 1.4, 1.6, 1.8])
        frame = EvalFrame(w=w, x=np.array([1.2, 1.7, 1.6, 1.8]))

        def quotient(q, qp):
            up, dn = w.copy(), w.copy()
            up[1], dn[1] = q * 1.7, qp * 1.7
            return (f.value(up[None])[0] - f.value(dn[None])[0]) / ((q - qp) * 1.7)

        assert np.array_equal(quotient(0.9, 0.5), quotient(0.5, 0.9))
        out = deformed_partial(f, 1, QQPair(0.9, 0.5), frame)
        assert np.array_equal(out, quotient(0.9, 0.5))


class TestDeformedFueter:
    QQ = QQVector.uniform(0.9, 0.5)

    def test_identity_diagonal_std(self, rng):
        f = identity_field(STANDARD)
        x = rng.uniform(1.0, 2.0, size=4)
        out = deformed_fueter_left(f, self.QQ, STANDARD, EvalFrame.diagonal(x))
        assert np.max(np.abs(out - np.array([-2.0, 0, 0, 0]))) <= 1e-14

    def test_identity_diagonal_right(self, rng):
        f = identity_field(STANDARD)
        x = rng.uniform(1.0, 2.0, size=4)
        out = deformed_fueter_right(f, self.QQ, STANDARD, EvalFrame.diagonal(x))
        assert np.max(np.abs(out - np.array([-2.0, 0, 0, 0]))) <= 1e-14

    def test_constant_gives_zero(self):
        f = ConstantField(np.array([1.0, 2.0, 3.0, 4.0]))
        out = deformed_fueter_left(f, self.QQ, STANDARD, EvalFrame.diagonal(np.full(4, 1.5)))
        assert np.max(np.abs(out)) < 1e-15

    def test_null_fields_annihilated_std(self, rng):
        for k in (1, 2, 3):
            f = fueter_variable(STANDARD, k)
            x = rng.uniform(1.0, 2.0, size=4)
            w = rng.uniform(1.0, 2.0, size=4)
            out = deformed_fueter_left(f, self.QQ, STANDARD, EvalFrame(w=w, x=x))
            assert np.max(np.abs(out)) <= 1e-13

    def test_null_fields_annihilated_unit_first_frame(self, rng):
        psi = random_structural_set(rng, first=ONE)
        for k in (1, 2, 3):
            f = fueter_variable(psi, k)
            x = rng.uniform(1.0, 2.0, size=4)
            out = deformed_fueter_left(f, self.QQ, psi, EvalFrame.diagonal(x))
            assert np.max(np.abs(out)) <= 1e-13

    def test_real_field_left_right_mirror(self, rng):
        # real-valued summands commute with the frame factors
        f = monomial_field((1, 1, 0, 2))
        x = rng.uniform(1.0, 2.0, size=4)
        frame = EvalFrame.diagonal(x)
        left = deformed_fueter_left(f, self.QQ, STANDARD, frame)
        right = deformed_fueter_right(f, self.QQ, STANDARD, frame)
        assert np.allclose(left, right, atol=1e-14)

    def test_square_is_scalar_on_real_polynomials(self, rng):
        terms = {
            (2, 0, 0, 0): np.array([1.0, 0, 0, 0]),
            (0, 1, 2, 0): np.array([0.5, 0, 0, 0]),
            (1, 0, 1, 1): np.array([-0.25, 0, 0, 0]),
        }
        f = PolynomialField(terms, name="real-poly")
        x = rng.uniform(1.0, 2.0, size=4)
        out = deformed_fueter_square(f, self.QQ, STANDARD, EvalFrame.diagonal(x))
        assert np.max(np.abs(out[1:])) <= 1e-12 * max(1.0, abs(out[0]))

    def test_limit_recovers_classical(self):
        from qqfueter.fields import fueter_left, power_field

        f = power_field(STANDARD, 3)
        x = np.array([1.2, 1.4, 1.6, 1.8])
        exact = fueter_left(f, STANDARD, x[None])[0]
        errs = []
        qps = [0.9, 0.99, 0.999]
        for qp in qps:
            qq = QQVector.uniform(1.0, qp)
            approx = deformed_fueter_left(f, qq, STANDARD, EvalFrame.diagonal(x))
            errs.append(np.linalg.norm(approx - exact))
        # linear decay in (1 - q')
        assert errs[0] / errs[1] == pytest.approx(10.0, rel=0.15)
        assert errs[1] / errs[2] == pytest.approx(10.0, rel=0.15)
