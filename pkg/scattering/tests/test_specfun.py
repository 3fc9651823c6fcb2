import math

import numpy as np
from django.test import SimpleTestCase
from scipy import special

from scattering.exceptions import InvalidArgumentError, NumericError
from scattering.specfun import (
    QuadratureConfig,
    bessel_j,
    bessel_j_signed,
    converged_periodic_average,
    integrate_adaptive,
    legendre_p,
    outgoing_log_derivative,
    periodic_average,
    regular_boundary_pairs,
    spherical_bessel_j,
    spherical_bessel_y,
    spherical_h1_log,
    spherical_hankel1,
)


class BesselJTests(SimpleTestCase):

    def test_against_scipy(self):
        for order in (0, 1, 2, 5, 20, 60):
            for x in (0.3, 1.0, 7.5, 33.0, 200.0, 400.0):
                with self.subTest(order=order, x=x):
                    expected = special.jv(order, x)
                    self.assertAlmostEqual(bessel_j(order, x), expected, delta=1e-13 + 1e-11 * abs(expected))

    def test_at_zero(self):
        self.assertEqual(bessel_j(0, 0.0), 1.0)
        self.assertEqual(bessel_j(3, 0.0), 0.0)

    def test_negative_order_and_argument(self):
        self.assertAlmostEqual(bessel_j(-3, 2.0), -special.jv(3, 2.0), places=14)
        self.assertAlmostEqual(bessel_j(3, -2.0), -special.jv(3, 2.0), places=14)

    def test_vectorised(self):
        x = np.linspace(0.0, 50.0, 11)
        np.testing.assert_allclose(bessel_j(0, x), special.j0(x), atol=1e-13)

    def test_recurrence(self):
        rng = np.random.default_rng(3)
        for n, x in zip(rng.integers(1, 60, size=40), rng.uniform(0.5, 300.0, size=40)):
            n = int(n)
            with self.subTest(n=n, x=x):
                lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x)
                rhs = 2.0 * n / x * bessel_j(n, x)
                self.assertAlmostEqual(lhs, rhs, delta=1e-10 * (1.0 + 2.0 * n / x))

    def test_sum_rule(self):
        for x in (0.1, 1.0, 7.3, 20.0, 33.3, 50.0):
            with self.subTest(x=x):
                table = bessel_j_signed(120, x)
                self.assertAlmostEqual(float(np.sum(table ** 2)), 1.0, delta=1e-10)

    def test_first_zero(self):
        self.assertAlmostEqual(bessel_j(0, 2.404825557695773), 0.0, delta=1e-10)

    def test_signed_table(self):
        table = bessel_j_signed(4, 2.5)
        self.assertEqual(table.shape, (9,))
        for n in range(-4, 5):
            self.assertAlmostEqual(table[n + 4], special.jv(n, 2.5), places=13)


class SphericalBesselTests(SimpleTestCase):

    def test_j_against_scipy(self):
        for l in (0, 1, 7, 37, 60):
            for z in (0.5, 10.0, 37.0):
                with self.subTest(l=l, z=z):
                    expected = special.spherical_jn(l, z)
                    value = spherical_bessel_j(l, z)
                    self.assertAlmostEqual(value.real, expected, delta=1e-300 + 1e-10 * abs(expected) + 1e-15)
                    self.assertEqual(value.imag, 0.0)

    def test_hankel_against_scipy(self):
        for l in (0, 3, 20, 50):
            z = 37.0
            expected = special.spherical_jn(l, z) + 1j * special.spherical_yn(l, z)
            value = spherical_hankel1(l, z)
            self.assertLess(abs(value - expected), 1e-10 * abs(expected))

    def test_y_against_scipy(self):
        self.assertAlmostEqual(spherical_bessel_y(2, 3.0).real, special.spherical_yn(2, 3.0), places=12)

    def test_wronskian(self):
        # j_l y_{l-1} - j_{l-1} y_l = 1 / x^2
        for l in (1, 2, 5, 12, 30):
            for x in (0.5, 2.0, 9.7, 37.0, 120.0):
                with self.subTest(l=l, x=x):
                    w = (spherical_bessel_j(l, x) * spherical_bessel_y(l - 1, x)
                         - spherical_bessel_j(l - 1, x) * spherical_bessel_y(l, x))
                    self.assertLess(abs(w * x ** 2 - 1.0), 1e-9)

    def test_imaginary_argument_scaled(self):
        x = 5.0
        for l in (0, 1, 4):
            expected = (1j ** l) * special.spherical_in(l, x) * math.exp(-x)
            value = spherical_bessel_j(l, 1j * x, scaled=True)
            self.assertLess(abs(value - expected), 1e-12 * abs(expected))

    def test_large_imaginary_argument_stays_finite(self):
        value = spherical_hankel1(3, 1000j, scaled=True)
        self.assertTrue(np.isfinite(value))
        log_h = spherical_h1_log(3, 1000j)[3]
        self.assertAlmostEqual(log_h.real, -1000.0 - math.log(1000.0), delta=0.01)

    def test_at_zero(self):
        self.assertEqual(spherical_bessel_j(0, 0.0), 1.0)
        self.assertEqual(spherical_bessel_j(2, 0.0), 0.0)
        with self.assertRaises(InvalidArgumentError):
            spherical_hankel1(0, 0.0)

    def test_negative_order(self):
        with self.assertRaises(InvalidArgumentError):
            spherical_bessel_j(-1, 1.0)

    def test_boundary_pairs_ratio(self):
        z = np.array([3.0, 12.0])
        value, slope = regular_boundary_pairs(4, z)
        expected = z * special.spherical_jn(4, z, derivative=True) / special.spherical_jn(4, z)
        np.testing.assert_allclose(slope / value, expected, rtol=1e-10)

    def test_boundary_pairs_at_zero(self):
        value, slope = regular_boundary_pairs(3, np.array([0.0]))
        self.assertAlmostEqual(slope[0] / value[0], 3.0)

    def test_outgoing_log_derivative(self):
        z = 7.0
        l = 5
        h = special.spherical_jn(l, z) + 1j * special.spherical_yn(l, z)
        dh = special.spherical_jn(l, z, derivative=True) + 1j * special.spherical_yn(l, z, derivative=True)
        self.assertLess(abs(outgoing_log_derivative(l, z) - z * dh / h), 1e-10)


class LegendreTests(SimpleTestCase):

    def test_against_scipy(self):
        for l in (0, 1, 2, 10, 80):
            for x in (-1.0, -0.3, 0.0, 0.77, 1.0):
                self.assertAlmostEqual(legendre_p(l, x), special.eval_legendre(l, x), places=12)

    def test_endpoints(self):
        self.assertEqual(legendre_p(17, 1.0), 1.0)
        self.assertAlmostEqual(legendre_p(17, -1.0), -1.0, places=12)

    def test_out_of_range(self):
        with self.assertRaises(InvalidArgumentError):
            legendre_p(2, 1.5)


class QuadratureTests(SimpleTestCase):

    def test_smooth_integral(self):
        result = integrate_adaptive(np.sin, 0.0, math.pi)
        self.assertAlmostEqual(result.value, 2.0, places=12)
        self.assertLessEqual(result.error, 1e-9)

    def test_complex_vector_integrand(self):
        def f(x):
            return np.stack([np.exp(1j * x), x ** 2], axis=1)

        result = integrate_adaptive(f, 0.0, 1.0)
        self.assertAlmostEqual(result.value[0], (np.exp(1j) - 1) / 1j, places=12)
        self.assertAlmostEqual(result.value[1], 1 / 3, places=12)

    def test_error_estimate_bounds_true_error(self):
        e = math.e
        suite = [
            (lambda x: x ** 2, 0.0, 1.0, 1 / 3, ()),
            (lambda x: x ** 5, 0.0, 2.0, 64 / 6, ()),
            (np.exp, 0.0, 1.0, e - 1, ()),
            (np.sin, 0.0, math.pi, 2.0, ()),
            (np.cos, 0.0, math.pi / 2, 1.0, ()),
            (lambda x: 1 / (1 + x ** 2), 0.0, 1.0, math.pi / 4, ()),
            (np.sqrt, 0.0, 1.0, 2 / 3, ()),
            (np.log1p, 0.0, 1.0, 2 * math.log(2) - 1, ()),
            (lambda x: np.exp(-x ** 2), 0.0, 3.0, math.sqrt(math.pi) / 2 * math.erf(3.0), ()),
            (lambda x: 1 / x, 1.0, e, 1.0, ()),
            (lambda x: x * np.exp(-x), 0.0, 5.0, 1 - 6 * math.exp(-5), ()),
            (lambda x: np.sin(x) ** 2, 0.0, math.pi, math.pi / 2, ()),
            (lambda x: np.cos(10 * x), 0.0, 1.0, math.sin(10) / 10, ()),
            (lambda x: np.abs(x - 0.3), 0.0, 1.0, 0.29, (0.3,)),
            (lambda x: np.exp(x) * np.cos(x), 0.0, 1.0, (e * (math.cos(1) + math.sin(1)) - 1) / 2, ()),
            (lambda x: x ** 1.5, 0.0, 1.0, 0.4, ()),
            (lambda x: 1 / (2 + np.cos(x)), 0.0, 2 * math.pi, 2 * math.pi / math.sqrt(3), ()),
            (np.tanh, 0.0, 1.0, math.log(math.cosh(1.0)), ()),
            (lambda x: x * np.sin(x), 0.0, math.pi, math.pi, ()),
            (lambda x: np.exp(1j * x), 0.0, math.pi, 2j, ()),
        ]
        for index, (f, a, b, exact, breakpoints) in enumerate(suite):
            with self.subTest(index=index):
                result = integrate_adaptive(f, a, b, breakpoints=breakpoints)
                self.assertLessEqual(abs(result.value - exact), result.error + 1e-14 * abs(exact))

    def test_breakpoint_jump(self):
        result = integrate_adaptive(lambda x: np.where(x < 0.3, 1.0, 2.0), 0.0, 1.0, breakpoints=[0.3])
        self.assertAlmostEqual(result.value, 1.7, places=12)

    def test_empty_interval(self):
        result = integrate_adaptive(np.cos, 1.0, 1.0)
        self.assertEqual(result.value, 0.0)
        self.assertEqual(result.error, 0.0)

    def test_reversed_limits(self):
        with self.assertRaises(InvalidArgumentError):
            integrate_adaptive(np.cos, 1.0, 0.0)

    def test_depth_limit_reports_estimate(self):
        cfg = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-14, max_depth=1)
        with self.assertRaises(NumericError) as ctx:
            integrate_adaptive(lambda x: np.sin(300.0 * x), 0.0, 10.0, cfg)
        self.assertIsNotNone(ctx.exception.estimate)
        self.assertGreater(ctx.exception.error, 0.0)

    def test_config_validation(self):
        with self.assertRaises(InvalidArgumentError):
            QuadratureConfig(t_nodes=15)
        with self.assertRaises(InvalidArgumentError):
            QuadratureConfig(abs_tol=0.0)


class PeriodicAverageTests(SimpleTestCase):

    def test_trigonometric_polynomial_is_exact(self):
        omega = 3.0
        T = 2 * math.pi / omega
        average = periodic_average(lambda t: 2.0 + np.cos(omega * t) + np.sin(5 * omega * t) ** 2, T, 16)
        self.assertAlmostEqual(average, 2.5, places=13)

    def test_converged_average_of_drive_phase(self):
        # <exp(i a sin(wt))> = J0(a)
        omega, a = 2.0, 40.0
        average, nodes = converged_periodic_average(
            lambda t: np.exp(1j * a * np.sin(omega * t)), 2 * math.pi / omega, 16, 1e-12)
        self.assertAlmostEqual(average.real, special.j0(a), places=11)
        self.assertGreater(nodes, 32)
