"""Mean-map behavior and metadata verification."""

from __future__ import annotations

import numpy as np
import pytest

from svilab import AffineMap, BimatrixMap, ContractViolation, ShiftedMap


class TestAffineMap:
    def test_evaluates(self):
        f = AffineMap(np.array([[2.0, 0.0], [0.0, 3.0]]), np.array([1.0, -1.0]))
        assert np.allclose(f(np.array([1.0, 1.0])), [3.0, 2.0])

    def test_metadata_computed_from_spectrum(self):
        a = np.array([[2.0, 1.0], [-1.0, 2.0]])
        f = AffineMap(a, np.zeros(2))
        # symmetric part is 2 I; spectral norm is sqrt(5)
        assert f.mu == pytest.approx(2.0, abs=1e-12)
        assert f.lipschitz == pytest.approx(np.sqrt(5.0), abs=1e-12)

    def test_declared_metadata_verified(self):
        a = np.diag([1.0, 4.0])
        f = AffineMap(a, np.zeros(2), mu=1.0, lipschitz=4.0)
        assert f.mu == 1.0 and f.lipschitz == 4.0

    def test_declared_mu_mismatch_rejected(self):
        with pytest.raises(ValueError, match="declared mu"):
            AffineMap(np.diag([1.0, 4.0]), np.zeros(2), mu=2.0)

    def test_declared_lipschitz_mismatch_rejected(self):
        with pytest.raises(ValueError, match="declared lipschitz"):
            AffineMap(np.diag([1.0, 4.0]), np.zeros(2), lipschitz=3.0)

    def test_nonmonotone_matrix_rejected(self):
        with pytest.raises(ValueError, match="not monotone"):
            AffineMap(np.diag([-1.0, 1.0]), np.zeros(2))

    def test_shape_checks(self):
        with pytest.raises(ValueError):
            AffineMap(np.ones((2, 3)), np.zeros(2))
        with pytest.raises(ValueError):
            AffineMap(np.eye(2), np.zeros(3))

    def test_output_is_fresh(self):
        f = AffineMap(np.eye(2), np.zeros(2))
        x = np.array([1.0, 2.0])
        out = f(x)
        out += 100.0
        assert np.array_equal(f(x), [1.0, 2.0])


class TestBimatrixMap:
    def test_saddle_structure(self):
        a = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, -1.0]])  # 2x3: m=2, n=3
        f = BimatrixMap(a)
        assert f.n == 3 and f.m == 2 and f.dimension == 5
        x = np.array([1.0, 0.0, 0.0])
        y = np.array([0.0, 1.0])
        got = f(np.concatenate([x, y]))
        assert np.allclose(got[:3], a.T @ y)
        assert np.allclose(got[3:], -(a @ x))

    def test_merely_monotone_metadata(self):
        a = np.array([[3.0, 0.0], [0.0, 4.0]])
        f = BimatrixMap(a)
        assert f.mu == 0.0
        assert f.lipschitz == pytest.approx(4.0, abs=1e-12)

    def test_skew_inner_product_vanishes(self):
        rng = np.random.default_rng(5)
        f = BimatrixMap(rng.standard_normal((3, 4)))
        for _ in range(100):
            z1 = rng.standard_normal(7)
            z2 = rng.standard_normal(7)
            val = float(np.dot(f(z1) - f(z2), z1 - z2))
            assert abs(val) <= 1e-10

    def test_rejects_bad_payoff(self):
        with pytest.raises(ValueError):
            BimatrixMap(np.ones(3))
        with pytest.raises(ValueError):
            BimatrixMap(np.array([[np.inf, 1.0]]))


class TestShiftedMap:
    def test_worked_example(self):
        base = AffineMap(np.array([[1.0]]), np.zeros(1))
        f = ShiftedMap(base, 0.5, np.array([1.0]))
        # F(3) + 2 (3 - 1) = 7
        assert f(np.array([3.0]))[0] == pytest.approx(7.0)

    def test_metadata_gains_inverse_lam(self):
        base = AffineMap(np.diag([1.0, 4.0]), np.zeros(2))
        f = ShiftedMap(base, 2.0, np.zeros(2))
        assert f.mu == pytest.approx(1.5)
        assert f.lipschitz == pytest.approx(4.5)
        assert f.dimension == 2

    def test_center_validated(self):
        base = AffineMap(np.eye(2), np.zeros(2))
        with pytest.raises(ContractViolation):
            ShiftedMap(base, 1.0, np.zeros(3))
        with pytest.raises(ContractViolation):
            ShiftedMap(base, 1.0, np.array([np.nan, 0.0]))
        with pytest.raises(ValueError):
            ShiftedMap(base, 0.0, np.zeros(2))

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(9)
        a = rng.standard_normal((4, 4))
        a = a @ a.T + 0.1 * np.eye(4)  # make it monotone
        base = AffineMap(a, rng.standard_normal(4))
        center = rng.standard_normal(4)
        f = ShiftedMap(base, 3.0, center)
        for _ in range(20):
            x = rng.standard_normal(4)
            want = base(x) + (x - center) / 3.0
            assert np.allclose(f(x), want, atol=1e-14, rtol=0)
