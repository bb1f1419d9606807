import numpy as np
import pytest

from qqfueter.errors import NotOrthonormal
from qqfueter.quaternion import (
    E1,
    E2,
    E3,
    ONE,
    Quaternion,
    STANDARD,
    det4,
    gram_schmidt,
    qconj,
    qinv,
    qmul,
    qnorm,
    random_structural_set,
    validate_structural_set,
)


def rand_quat(rng):
    return Quaternion(*rng.normal(size=4))


class TestProduct:
    def test_unit_table(self):
        assert E1 * E2 == E3
        assert E2 * E3 == E1
        assert E3 * E1 == E2
        for e in (E1, E2, E3):
            assert e * e == -ONE

    def test_identity_element(self, rng):
        x = rand_quat(rng)
        assert (x * ONE - x).norm() == 0.0
        assert (ONE * x - x).norm() == 0.0

    def test_expansion(self):
        # (1 + e1)(1 - e1) = 1 - e1^2 = 2
        out = (ONE + E1) * (ONE - E1)
        assert (out - Quaternion(2.0)).norm() < 1e-15

    def test_anticommutators(self):
        units = [E1, E2, E3]
        for i, a in enumerate(units):
            for j, b in enumerate(units):
                anti = a * b + b * a
                expected = Quaternion(-2.0 if i == j else 0.0)
                assert (anti - expected).norm() < 1e-15

    def test_norm_multiplicative(self, rng):
        for _ in range(200):
            x, y = rand_quat(rng), rand_quat(rng)
            assert abs((x * y).norm() - x.norm() * y.norm()) <= 1e-12 * x.norm() * y.norm()


class TestConjugation:
    def test_examples(self):
        assert (ONE + E1).conj() == ONE - E1
        assert (E1 * E2).conj() == -E3
        assert (E1 * E2).conj() == E2.conj() * E1.conj()

    def test_involution(self, rng):
        x = rand_quat(rng)
        assert (x.conj().conj() - x).norm() == 0.0

    def test_anti_homomorphism(self, rng):
        for _ in range(200):
            x, y = rand_quat(rng), rand_quat(rng)
            lhs = (x * y).conj()
            rhs = y.conj() * x.conj()
            assert (lhs - rhs).norm() <= 1e-13 * max(1.0, lhs.norm())


class TestNormInverse:
    def test_norm_sq(self):
        assert (ONE + E1 + E2 + E3).norm_sq() == 4.0

    def test_scalar_inverse(self):
        assert (Quaternion(2.0).inverse() - Quaternion(0.5)).norm() == 0.0

    def test_unit_inverse(self):
        assert (E1.inverse() - (-E1)).norm() == 0.0

    def test_inverse_identity(self, rng):
        x = rand_quat(rng)
        assert (x * x.inverse() - ONE).norm() < 1e-14

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            Quaternion().inverse()
        with pytest.raises(ZeroDivisionError):
            qinv(np.zeros(4))


class TestVectorized:
    def test_matches_scalar(self, rng):
        a = rng.normal(size=(50, 4))
        b = rng.normal(size=(50, 4))
        prod = qmul(a, b)
        for i in range(50):
            expected = Quaternion.from_array(a[i]) * Quaternion.from_array(b[i])
            assert np.allclose(prod[i], expected.as_array(), atol=1e-14)

    def test_conj_norm(self, rng):
        a = rng.normal(size=(10, 4))
        assert np.allclose(qmul(a, qconj(a))[:, 0], qnorm(a) ** 2)
        assert np.allclose(qmul(a, qconj(a))[:, 1:], 0.0, atol=1e-13)


class TestStructuralSet:
    def test_standard(self):
        assert STANDARD.sign == 1
        assert STANDARD.is_standard()

    def test_row_swap_flips_sign(self):
        s = validate_structural_set([ONE, E2, E1, E3])
        assert s.sign == -1

    def test_repeated_vector_rejected(self):
        with pytest.raises(NotOrthonormal) as exc:
            validate_structural_set([ONE, E1, E1, E3])
        assert exc.value.pair in ((1, 2), (2, 2))

    def test_to_coords_basis_vector(self):
        assert np.allclose(STANDARD.to_coords(E2), [0, 0, 1, 0])

    def test_to_coords_projection(self):
        x = Quaternion(3.0) - E2
        assert np.allclose(STANDARD.to_coords(x), [3, 0, -1, 0])

    def test_round_trip(self, rng):
        for _ in range(50):
            psi = random_structural_set(rng)
            x = rng.normal(size=4)
            back = psi.from_coords(psi.to_coords(x))
            assert np.max(np.abs(back - x)) <= 1e-14 * max(1.0, np.max(np.abs(x)))

    def test_sum_of_squares(self, rng):
        for _ in range(50):
            psi = random_structural_set(rng)
            total = sum((psi.psi(k) * psi.psi(k) for k in range(4)), Quaternion())
            assert (total - Quaternion(-2.0)).norm() <= 1e-12

    def test_sign_matches_det(self, rng):
        for _ in range(20):
            psi = random_structural_set(rng)
            assert psi.sign == (1 if np.linalg.det(psi.vectors) > 0 else -1)

    def test_fixed_first_element(self, rng):
        psi = random_structural_set(rng, first=ONE)
        assert np.allclose(psi.vectors[0], [1, 0, 0, 0])


class TestDet4:
    def test_against_numpy(self, rng):
        for _ in range(30):
            m = rng.normal(size=(4, 4))
            assert abs(det4(m) - np.linalg.det(m)) <= 1e-10 * max(1.0, abs(np.linalg.det(m)))

    def test_gram_schmidt_orthonormal(self, rng):
        q = gram_schmidt(rng.normal(size=(4, 4)))
        assert np.allclose(q @ q.T, np.eye(4), atol=1e-13)
