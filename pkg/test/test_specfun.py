import math

import mpmath
import numpy as np
import pytest
from scipy import special

from errors import DomainError
from services import specfun


def mp_bessel(nu, x):
    with mpmath.workdps(40):
        return float(mpmath.besselj(nu, x))


class TestBesselJ:
    def test_origin(self):
        assert specfun.bessel_j(0.0, 0.0) == 1.0
        assert specfun.bessel_j(2.5, 0.0) == 0.0

    def test_half_order_vanishes_at_pi(self):
        assert abs(specfun.bessel_j(0.5, math.pi)) < 1e-15

    def test_extended_precision_series(self):
        # x/2 = 1, so the series is sum (-1)^k / (k! Gamma(k + 5/2))
        with mpmath.workdps(50):
            reference = mpmath.fsum(
                (-1) ** k / (mpmath.factorial(k) * mpmath.gamma(k + mpmath.mpf("2.5"))) for k in range(40)
            )
        assert specfun.bessel_j(1.5, 2.0) == pytest.approx(float(reference), rel=1e-13)

    @pytest.mark.parametrize("nu", [0.0, 0.3, 1.0, 2.7, 7.5, 20.0, 50.0])
    @pytest.mark.parametrize("x", [0.05, 1.0, 8.0, 11.9, 12.1, 17.3, 24.9, 25.1, 60.0, 499.0])
    def test_against_mpmath(self, nu, x):
        expected = mp_bessel(nu, x)
        assert specfun.bessel_j(nu, x) == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_random_sample_against_scipy(self):
        rng = np.random.default_rng(7)
        for nu, x in zip(rng.uniform(0.0, 50.0, 300), rng.uniform(0.0, 500.0, 300)):
            assert specfun.bessel_j(nu, x) == pytest.approx(special.jv(nu, x), rel=1e-10, abs=1e-14)

    def test_recurrence_identity(self):
        rng = np.random.default_rng(11)
        for nu, x in zip(rng.uniform(1.0, 10.0, 200), rng.uniform(0.1, 50.0, 200)):
            lhs = specfun.bessel_j(nu - 1, x) + specfun.bessel_j(nu + 1, x)
            assert abs(lhs - 2 * nu / x * specfun.bessel_j(nu, x)) < 1e-11

    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.7, 5.0])
    def test_regimes_agree_at_switchovers(self, nu):
        for x in np.linspace(3.0, 7.0, 9):
            assert specfun.bessel_j_regime(nu, x, "series") == pytest.approx(
                specfun.bessel_j_regime(nu, x, "miller"), abs=1e-11)
        for x in np.linspace(25.0, 40.0, 16):
            assert specfun.bessel_j_regime(nu, x, "miller") == pytest.approx(
                specfun.bessel_j_regime(nu, x, "hankel"), abs=1e-11)

    def test_array(self):
        xs = np.array([[0.5, 1.0], [20.0, 30.0]])
        values = specfun.bessel_j_array(1.0, xs)
        assert values.shape == (2, 2)
        np.testing.assert_allclose(values, special.jv(1.0, xs), rtol=1e-12)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            specfun.bessel_j(0.0, -1.0)

    def test_negative_order(self):
        with pytest.raises(DomainError):
            specfun.bessel_j(-0.5, 1.0)

    def test_unknown_regime(self):
        with pytest.raises(ValueError):
            specfun.bessel_j_regime(1.0, 1.0, "continued_fraction")


class TestDerivative:
    def test_at_first_zero(self):
        j01 = 2.404825557695773
        assert specfun.bessel_j_prime(0.0, j01) == pytest.approx(-0.5191474972894669, rel=1e-12)

    def test_small_argument(self):
        assert specfun.bessel_j_prime(1.0, 1e-6) == pytest.approx(0.5, rel=1e-9)

    def test_finite_differences(self):
        rng = np.random.default_rng(3)
        h = 1e-5
        for nu, x in zip(rng.uniform(0.0, 10.0, 20), rng.uniform(0.5, 40.0, 20)):
            fd = (specfun.bessel_j(nu, x + h) - specfun.bessel_j(nu, x - h)) / (2 * h)
            assert abs(fd - specfun.bessel_j_prime(nu, x)) < 1e-8

    def test_rejects_origin(self):
        with pytest.raises(DomainError):
            specfun.bessel_j_prime(1.0, 0.0)


class TestZeros:
    def test_first_zero_of_j0(self):
        assert specfun.bessel_zero(0.0, 1) == pytest.approx(2.404825557695773, abs=1e-12)

    def test_half_order_zeros_are_multiples_of_pi(self):
        assert specfun.bessel_zero(0.5, 3) == pytest.approx(3 * math.pi, abs=1e-12)

    def test_three_halves_order(self):
        # J_{3/2} zeros solve tan x = x
        assert specfun.bessel_zero(1.5, 1) == pytest.approx(4.493409457909064, abs=1e-12)

    @pytest.mark.parametrize("nu", [0, 1, 2, 5, 10])
    def test_integer_orders_against_scipy(self, nu):
        np.testing.assert_allclose(specfun.bessel_zeros(float(nu), 20), special.jn_zeros(nu, 20), rtol=0, atol=1e-11)

    @pytest.mark.parametrize("nu", [0.25, 2.7, 13.3])
    def test_real_orders_against_mpmath(self, nu):
        zeros = specfun.bessel_zeros(nu, 6)
        for n, z in enumerate(zeros, start=1):
            with mpmath.workdps(30):
                expected = float(mpmath.besseljzero(nu, n))
            assert z == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("nu, n", [(0.0, 50), (2.7, 20), (0.25, 6), (13.3, 12)])
    def test_high_zeros_absolute_accuracy(self, nu, n):
        with mpmath.workdps(40):
            expected = float(mpmath.besseljzero(nu, n))
        assert abs(specfun.bessel_zero(nu, n) - expected) < 1e-12

    def test_sign_change_across_each_zero(self):
        for nu in (0.0, 1.5, 4.2):
            for z in specfun.bessel_zeros(nu, 10):
                assert specfun.bessel_j(nu, z - 1e-9) * specfun.bessel_j(nu, z + 1e-9) < 0

    def test_strictly_increasing_and_interlaced(self):
        for nu in (0.0, 0.5, 2.7):
            lower = specfun.bessel_zeros(nu, 11)
            upper = specfun.bessel_zeros(nu + 1, 10)
            assert np.all(np.diff(lower) > 0)
            for n in range(10):
                assert lower[n] < upper[n] < lower[n + 1]

    @pytest.mark.parametrize("nu", [0.0, 1.0, 2.5])
    def test_mcmahon_first_correction(self, nu):
        n = 50
        beta = (n + nu / 2 - 0.25) * math.pi
        correction = -(4 * nu * nu - 1) / (8 * beta)
        assert specfun.bessel_zero(nu, n) - beta == pytest.approx(correction, rel=0.05)

    def test_mcmahon_estimate_close_for_large_index(self):
        assert specfun.mcmahon_zero(0.0, 30) == pytest.approx(specfun.bessel_zero(0.0, 30), abs=1e-9)

    def test_single_pass_matches_indexed(self):
        zeros = specfun.bessel_zeros(3.3, 5)
        assert specfun.bessel_zero(3.3, 5) == zeros[-1]

    @pytest.mark.parametrize("n", [0, -1])
    def test_rejects_bad_index(self, n):
        with pytest.raises(DomainError):
            specfun.bessel_zero(1.0, n)


class TestAuxiliary:
    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 3.7, 10.0, 25.5])
    def test_gamma(self, x):
        assert specfun.gamma_lanczos(x) == pytest.approx(math.gamma(x), rel=1e-13)

    def test_gamma_domain(self):
        with pytest.raises(DomainError):
            specfun.gamma_lanczos(0.0)

    def test_leading_form_tracks_large_argument(self):
        x = 400.0
        assert specfun.bessel_j_leading(2.0, x) == pytest.approx(special.jv(2.0, x), abs=5e-4)

    def test_neumann_not_provided(self):
        with pytest.raises(NotImplementedError):
            specfun.neumann_y(0.0, 1.0)
