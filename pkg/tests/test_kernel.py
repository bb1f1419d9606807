import numpy as np
import pytest

from qqfueter.errors import PoleHit
from qqfueter.kernel import (
    KERNEL_CONST,
    hyperholomorphy_residual,
    kernel,
    kernel_partial,
    kernel_value,
)
from qqfueter.quaternion import STANDARD, qconj, qnorm, random_structural_set


class TestKernelValue:
    def test_unit_displacement(self):
        # y = psi_0 with |y| = 1 gives conj(psi_0) / (2 pi^2)
        val = kernel_value(np.array([1.0, 0, 0, 0]), STANDARD)
        assert np.allclose(val, KERNEL_CONST * qconj(STANDARD.vectors[0]))

    def test_oddness(self, rng):
        y = rng.normal(size=(20, 4))
        assert np.allclose(kernel_value(-y, STANDARD), -kernel_value(y, STANDARD))

    def test_homogeneity_degree_minus_three(self, rng):
        y = rng.normal(size=(20, 4))
        for t in (2.0, 0.5, 3.7):
            lhs = kernel_value(t * y, STANDARD)
            rhs = kernel_value(y, STANDARD) / t**3
            assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))

    def test_pole_hit(self):
        with pytest.raises(PoleHit):
            kernel_value(np.zeros(4), STANDARD)
        with pytest.raises(PoleHit):
            kernel(np.ones(4), np.ones(4) + 1e-15, STANDARD)

    def test_scalar_api(self, rng):
        tau, x = rng.normal(size=4), rng.normal(size=4)
        ev = kernel(tau, x, STANDARD)
        assert np.allclose(ev.value.as_array(), kernel_value(tau - x, STANDARD))
        assert len(ev.partials) == 4


class TestKernelPartials:
    def test_against_central_differences(self, rng):
        h = 1e-6
        worst = 0.0
        for _ in range(100):
            y = rng.normal(size=4)
            if np.linalg.norm(y) < 0.3:
                continue
            for k in range(4):
                up, dn = y.copy(), y.copy()
                up[k] += h
                dn[k] -= h
                fd = (kernel_value(up, STANDARD) - kernel_value(dn, STANDARD)) / (2 * h)
                exact = kernel_partial(k, y, STANDARD)
                rel = np.max(np.abs(fd - exact)) / max(1e-30, np.max(np.abs(exact)))
                worst = max(worst, rel)
        assert worst <= 1e-7

    def test_rotated_frame(self, rng):
        psi = random_structural_set(rng)
        y = rng.normal(size=4)
        h = 1e-6
        for k in range(4):
            up, dn = y.copy(), y.copy()
            up[k] += h
            dn[k] -= h
            fd = (kernel_value(up, psi) - kernel_value(dn, psi)) / (2 * h)
            exact = kernel_partial(k, y, psi)
            assert np.max(np.abs(fd - exact)) <= 1e-6 * max(1.0, np.max(np.abs(exact)))


class TestHyperholomorphy:
    def test_exact_residuals_both_sides(self, rng):
        pole = np.zeros(4)
        for _ in range(30):
            x = rng.normal(size=4)
            if np.linalg.norm(x) < 0.5:
                continue
            assert hyperholomorphy_residual(x, pole, STANDARD, side="left") <= 1e-12
            assert hyperholomorphy_residual(x, pole, STANDARD, side="right") <= 1e-12

    def test_rotated_frame_residual(self, rng):
        psi = random_structural_set(rng)
        x = np.array([0.9, -0.7, 0.6, 1.1])
        assert hyperholomorphy_residual(x, np.zeros(4), psi, side="left") <= 1e-12

    def test_finite_difference_cross_check(self, rng):
        # left operator assembled from central differences of the value
        pole = np.zeros(4)
        h = 1e-6
        from qqfueter.quaternion import qmul

        for _ in range(10):
            x = rng.normal(size=4)
            if np.linalg.norm(x) < 0.6:
                continue
            total = np.zeros(4)
            for k in range(4):
                up, dn = x.copy(), x.copy()
                up[k] += h
                dn[k] -= h
                fd = (kernel_value(up - pole, STANDARD) - kernel_value(dn - pole, STANDARD)) / (2 * h)
                total = total + qmul(STANDARD.vectors[k], fd)
            assert float(qnorm(total)) <= 1e-6

    def test_pole_hit(self):
        with pytest.raises(PoleHit):
            hyperholomorphy_residual(np.ones(4), np.ones(4), STANDARD)
