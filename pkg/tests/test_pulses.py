import numpy as np
import pytest

from spopo import (AboveThresholdError, ValidationError, covariance, duan_sum,
                   io_series_coefficients, min_variance_direct,
                   min_variance_transcendental, sigma2_limit)

from conftest import below_threshold_draws


def series_covariance_entry(g, r, separation, sign):
    """Independent covariance evaluation by direct series summation."""
    t2 = 1 - r * r
    q = r * np.exp(sign * g)
    s_max = max(8, int(np.ceil(np.log(1e-18) / (2 * np.log(q)))) if q > 0 else 8)
    coeff = np.empty(s_max + 1)
    coeff[0] = -r
    s = np.arange(1, s_max + 1)
    coeff[1:] = t2 * r ** (s - 1) * np.exp(sign * g * s)
    if separation == 0:
        return 0.5 * np.sum(coeff**2)
    return 0.5 * np.sum(coeff[separation:] * coeff[:-separation])


class TestSeriesCoefficients:
    def test_zero_gain_lossless(self):
        r = 0.8
        t = np.sqrt(1 - r * r)
        cx, cp = io_series_coefficients(0.0, r, t)
        np.testing.assert_allclose(cx, cp)
        assert cx[0] == -r
        assert cx[1] == pytest.approx(t**2)
        assert cx[2] == pytest.approx(t**2 * r)
        assert np.sum(cx**2) == pytest.approx(1.0, abs=1e-12)

    def test_no_cavity_single_pass(self):
        cx, cp = io_series_coefficients(0.4, 0.0, 1.0, s_max=3)
        np.testing.assert_allclose(cx[2:], 0.0, atol=1e-15)
        assert cx[1] == pytest.approx(np.exp(0.4))
        assert cp[1] == pytest.approx(np.exp(-0.4))

    def test_sum_matches_diagonal_variance(self):
        g, r = 0.08, 0.9
        t = np.sqrt(1 - r * r)
        cx, cp = io_series_coefficients(g, r, t)
        cov = covariance(g, r, 1)
        assert 0.5 * np.sum(cp**2) == pytest.approx(cov.v_minus[0, 0], abs=1e-12)
        assert 0.5 * np.sum(cx**2) == pytest.approx(cov.v_plus[0, 0], abs=1e-10)

    def test_above_threshold_rejected(self):
        with pytest.raises(AboveThresholdError):
            io_series_coefficients(0.2, 0.9, np.sqrt(1 - 0.81))

    def test_r_t_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            io_series_coefficients(0.1, 0.9, 0.9)


class TestCovariance:
    def test_vacuum(self):
        cov = covariance(0.0, 0.7, 5)
        np.testing.assert_allclose(cov.v_plus, 0.5 * np.eye(5), atol=1e-15)
        np.testing.assert_allclose(cov.v_minus, 0.5 * np.eye(5), atol=1e-15)

    def test_threshold_diagonal(self):
        for r in (0.5, 0.8, 0.9, 0.99):
            cov = covariance(-np.log(r), r, 2)
            assert cov.v_minus[0, 0] / 0.5 == pytest.approx(
                2 * r**2 / (1 + r**2), abs=1e-12)

    def test_toeplitz_and_signs(self):
        g, r = 0.1, 0.85
        cov = covariance(g, r, 8)
        for mat in (cov.v_plus, cov.v_minus):
            first = mat[0]
            for j in range(8):
                np.testing.assert_allclose(mat[j, j:], first[:8 - j], rtol=1e-13)
        off = ~np.eye(8, dtype=bool)
        assert np.all(cov.v_plus[off] > 0)
        assert np.all(cov.v_minus[off] < 0)
        assert cov.v_minus[0, 0] < 0.5 < cov.v_plus[0, 0]

    def test_correlation_decay_rate(self):
        g, r = 0.07, 0.8
        cov = covariance(g, r, 8)
        ratios_plus = cov.v_plus[0, 2:] / cov.v_plus[0, 1:-1]
        ratios_minus = cov.v_minus[0, 2:] / cov.v_minus[0, 1:-1]
        np.testing.assert_allclose(ratios_plus, r * np.exp(g), rtol=1e-12)
        np.testing.assert_allclose(ratios_minus, r * np.exp(-g), rtol=1e-12)

    def test_closed_form_matches_series(self):
        g, r = 0.12, 0.75
        cov = covariance(g, r, 7)
        for sep in range(7):
            assert cov.v_plus[0, sep] == pytest.approx(
                series_covariance_entry(g, r, sep, +1), abs=1e-12)
            assert cov.v_minus[0, sep] == pytest.approx(
                series_covariance_entry(g, r, sep, -1), abs=1e-12)

    def test_purity_defect(self):
        rng = np.random.default_rng(17)
        for gain, r in below_threshold_draws(rng, 50):
            cov = covariance(gain, r, 1)
            assert cov.v_plus[0, 0] * cov.v_minus[0, 0] > 0.25

    def test_odd_branch_is_sign_flip_similarity(self):
        g, r, n = 0.09, 0.8, 6
        even = covariance(g, r, n, "even")
        odd = covariance(g, r, n, "odd")
        signs = np.diag((-1.0) ** np.arange(n))
        np.testing.assert_allclose(odd.v_minus, signs @ even.v_minus @ signs,
                                   rtol=1e-13)


class TestMinVariance:
    @pytest.mark.parametrize("n", [2, 3, 5, 8, 16, 32, 64])
    def test_transcendental_matches_dense(self, n):
        rng = np.random.default_rng(n)
        gain, r = below_threshold_draws(rng, 1)[0]
        cov = covariance(gain, r, n)
        dense = min_variance_direct(cov)
        semi = min_variance_transcendental(gain, r, n)
        assert semi.sigma2 == pytest.approx(dense.sigma2, abs=1e-10)
        assert abs(np.dot(semi.eigvec, dense.eigvec)) > 1 - 1e-10
        residual = cov.v_minus @ semi.eigvec - semi.sigma2 * semi.eigvec
        assert np.abs(residual).max() < 1e-8

    def test_angle_in_range(self):
        for n in (2, 5, 40):
            sol = min_variance_transcendental(0.1, 0.8, n)
            assert 0.0 < n * sol.theta_sol < np.pi

    def test_eigvec_symmetric(self):
        sol = min_variance_transcendental(0.1, 0.8, 9)
        np.testing.assert_allclose(sol.eigvec, sol.eigvec[::-1], rtol=1e-12)

    def test_single_pulse(self):
        g, r = 0.1, 0.8
        sol = min_variance_transcendental(g, r, 1)
        assert sol.sigma2 == pytest.approx(covariance(g, r, 1).v_minus[0, 0])
        np.testing.assert_allclose(sol.eigvec, [1.0])

    def test_degenerate_vacuum_tie_break(self):
        sol = min_variance_direct(covariance(0.0, 0.8, 4))
        assert sol.sigma2 == pytest.approx(0.5)
        np.testing.assert_allclose(sol.eigvec, np.eye(4)[:, 0], atol=1e-14)

    def test_sigma2_nonincreasing_in_n(self):
        g, r = 0.08, 0.85
        values = [min_variance_transcendental(g, r, n).sigma2
                  for n in range(1, 80)]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
        assert values[-1] > sigma2_limit(g, r)

    def test_odd_branch_matches_dense(self):
        g, r, n = 0.06, 0.8, 12
        cov = covariance(g, r, n, "odd")
        dense = min_variance_direct(cov)
        semi = min_variance_transcendental(g, r, n, "odd")
        assert semi.sigma2 == pytest.approx(dense.sigma2, abs=1e-10)
        assert abs(np.dot(semi.eigvec, dense.eigvec)) > 1 - 1e-10


class TestDuanSum:
    def test_vacuum_is_exactly_two(self):
        cov = covariance(0.0, 0.7, 6)
        for sep in range(1, 6):
            assert duan_sum(cov, 0, sep) == pytest.approx(2.0, abs=1e-14)

    def test_matches_explicit_marginals(self):
        g, r = 0.11, 0.82
        cov = covariance(g, r, 6)
        j, k = 1, 4
        var_x = cov.v_plus[j, j] + cov.v_plus[k, k] - 2 * cov.v_plus[j, k]
        var_p = cov.v_minus[j, j] + cov.v_minus[k, k] + 2 * cov.v_minus[j, k]
        assert duan_sum(cov, j, k) == pytest.approx(var_x + var_p, rel=1e-14)

    def test_monotone_toward_uncorrelated_value(self):
        g, r = 0.15, 0.4
        cov = covariance(g, r, 12)
        values = [duan_sum(cov, 0, d) for d in range(1, 12)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        limit = 2 * (cov.v_plus[0, 0] + cov.v_minus[0, 0])
        assert values[-1] < limit
        # correlations decay like (r e^g)^d: essentially gone by d = 11
        assert values[-1] == pytest.approx(limit, rel=1e-3)

    def test_adjacent_pulses_beat_separability_bound(self):
        # the closed-form covariances make adjacent pulses entangled:
        # duan = 2 - 4 r g + O(g^2) (see the acceptance suite notes)
        g, r = 0.005, 0.8
        cov = covariance(g, r, 2)
        value = duan_sum(cov, 0, 1)
        assert value < 2.0
        assert value == pytest.approx(2 - 4 * r * g, abs=20 * g**2)

    def test_index_validation(self):
        cov = covariance(0.1, 0.8, 3)
        with pytest.raises(ValidationError):
            duan_sum(cov, 1, 1)
        with pytest.raises(ValidationError):
            duan_sum(cov, 0, 3)


class TestCombIntegralOracle:
    def test_covariance_from_comb_blocks(self):
        """Cross-module consistency: the pulse covariance entries are the
        comb-shift Fourier coefficients of the cavity block spectra,

            V_(j,k)^(-) = (1/2pi) int dtheta e^{i(j-k)theta}
                          [ |C|^2 + |S|^2 - 2 Re C(theta) S(-theta) ] / 2

        (+ branch with the opposite correlator sign)."""
        from spopo import CavityConfig, comb_io

        g, r, n = 0.08, 0.9, 4
        cavity = CavityConfig(r=r)
        m = 2048
        thetas = (np.arange(m) + 0.5) * 2 * np.pi / m - np.pi
        c_arr = np.empty(m, complex)
        s_arr = np.empty(m, complex)
        s_neg = np.empty(m, complex)
        for i, th in enumerate(thetas):
            block = comb_io(g, th, cavity, 0.0)
            c_arr[i], s_arr[i] = block.c, block.s
            s_neg[i] = comb_io(g, -th, cavity, 0.0).s
        base = np.abs(c_arr) ** 2 + np.abs(s_arr) ** 2
        cross = 2 * np.real(c_arr * s_neg)
        cov = covariance(g, r, n)
        for sep in range(n):
            phase = np.exp(1j * sep * thetas)
            v_minus = np.mean(phase * (base - cross)).real / 2
            v_plus = np.mean(phase * (base + cross)).real / 2
            assert v_minus == pytest.approx(cov.v_minus[0, sep], abs=1e-12)
            assert v_plus == pytest.approx(cov.v_plus[0, sep], abs=1e-12)


class TestThresholdGuards:
    def test_above_threshold_covariance(self):
        with pytest.raises(AboveThresholdError):
            covariance(0.3, 0.9, 4)

    def test_sigma2_limit_matches_closed_form(self):
        g, r = 0.09, 0.87
        expected = 0.5 * ((r - np.exp(-g)) / (1 - r * np.exp(-g))) ** 2
        assert sigma2_limit(g, r) == pytest.approx(expected, rel=1e-14)
