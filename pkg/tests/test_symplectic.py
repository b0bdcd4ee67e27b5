import numpy as np
import pytest

from spopo import (ModePairTransform, ValidationError, check_symplectic,
                   compose, minimum_quadrature_variance, output_covariance,
                   quadrature_matrix)


def random_block(rng) -> ModePairTransform:
    g = rng.uniform(0.0, 2.0)
    phi_c, phi_s = rng.uniform(-np.pi, np.pi, size=2)
    return ModePairTransform(c=np.cosh(g) * np.exp(1j * phi_c),
                             s=np.sinh(g) * np.exp(1j * phi_s))


class TestCheckSymplectic:
    def test_identity(self):
        assert check_symplectic(ModePairTransform(1.0, 0.0), 1e-12)

    def test_hyperbolic_pair(self):
        g = 0.3
        assert check_symplectic(ModePairTransform(np.cosh(g), np.sinh(g)), 1e-12)

    def test_unit_coefficients_rejected(self):
        assert not check_symplectic(ModePairTransform(1.0, 1.0), 1e-12)

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValidationError):
            check_symplectic(ModePairTransform(1.0, 0.0), 0.0)


class TestCompose:
    def test_identity_is_neutral(self):
        t = ModePairTransform(np.cosh(0.4), np.sinh(0.4))
        out = compose(ModePairTransform(1.0, 0.0), t)
        assert out.c == pytest.approx(t.c) and out.s == pytest.approx(t.s)

    def test_squeezers_add_gains(self):
        g1, g2 = 0.25, 0.4
        out = compose(ModePairTransform(np.cosh(g1), np.sinh(g1)),
                      ModePairTransform(np.cosh(g2), np.sinh(g2)))
        assert out.c == pytest.approx(np.cosh(g1 + g2), rel=1e-12)
        assert out.s == pytest.approx(np.sinh(g1 + g2), rel=1e-12)

    def test_rotation_times_squeezer_stays_symplectic(self):
        phi, g = 0.7, 0.5
        rot = ModePairTransform(np.exp(1j * phi), 0.0)
        sq = ModePairTransform(np.cosh(g), np.sinh(g))
        out = compose(rot, sq)
        assert abs(out.symplectic_defect()) < 1e-12

    def test_rejects_nonsymplectic(self):
        with pytest.raises(ValidationError):
            compose(ModePairTransform(1.0, 1.0), ModePairTransform(1.0, 0.0))

    def test_associative_on_random_triples(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            a, b, c = (random_block(rng) for _ in range(3))
            left = compose(compose(a, b), c)
            right = compose(a, compose(b, c))
            assert abs(left.c - right.c) <= 1e-12 * max(1.0, abs(left.c))
            assert abs(left.s - right.s) <= 1e-12 * max(1.0, abs(left.s))


class TestOutputCovariance:
    def test_vacuum_through_identity(self):
        assert output_covariance(ModePairTransform(1.0, 0.0)) == (0.5, 0.5, 0.0)

    def test_single_mode_squeezer(self):
        g = 0.3
        t = ModePairTransform(np.cosh(g), np.sinh(g))
        var_x, var_p, cov = output_covariance(t)
        assert var_p == pytest.approx(0.5 * np.exp(-2 * g), rel=1e-12)
        assert var_x == pytest.approx(0.5 * np.exp(2 * g), rel=1e-12)
        assert cov == pytest.approx(0.0, abs=1e-15)
        assert t.c - t.s == pytest.approx(np.exp(-g), rel=1e-12)

    def test_uncertainty_product_preserved(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            var_x, var_p, cov = output_covariance(random_block(rng))
            # determinant of the quadrature covariance is the invariant bound
            assert var_x * var_p - cov**2 >= 0.25 * (1 - 1e-12)

    def test_quadrature_matrix_det_is_one(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            m = quadrature_matrix(random_block(rng))
            assert np.linalg.det(m) == pytest.approx(1.0, rel=1e-10)

    def test_minimum_variance_over_angles(self):
        rng = np.random.default_rng(5)
        t = random_block(rng)
        expected = 0.5 * (abs(t.c) - abs(t.s)) ** 2
        assert minimum_quadrature_variance(t) == pytest.approx(expected)
        # never above the lab-frame p variance
        assert expected <= output_covariance(t)[1] + 1e-15
