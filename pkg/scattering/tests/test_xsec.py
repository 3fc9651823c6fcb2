import math

from django.test import SimpleTestCase

from scattering.exceptions import InvalidArgumentError
from scattering.exact import sigma_total_exact
from scattering.kinematics import HBAR_2M, make_kinematics
from scattering.oracles import static_ea_sigma
from scattering.potentials import ShakingSquareWell
from scattering.validation import gaussian_test_potential
from scattering.xsec import (
    AS_PRINTED,
    FLUX_WEIGHTED,
    CrossSectionResult,
    differential_cross_section,
    optical_result,
    relative_difference,
    sigma_total_ea,
    sigma_total_optical,
)


class DifferentialCrossSectionTests(SimpleTestCase):

    def setUp(self):
        # k_1 = sqrt(1 + 15) = 4k
        self.kin = make_kinematics(1, 15)

    def test_flux_conventions(self):
        self.assertEqual(differential_cross_section(1.0, self.kin, 1), (2.0, AS_PRINTED))
        self.assertEqual(differential_cross_section(1.0, self.kin, 1, FLUX_WEIGHTED), (4.0, FLUX_WEIGHTED))

    def test_elastic_channel_is_plain_modulus_squared(self):
        for mode in (AS_PRINTED, FLUX_WEIGHTED):
            self.assertEqual(differential_cross_section(3 + 4j, self.kin, 0, mode)[0], 25.0)

    def test_closed_channel(self):
        with self.assertRaises(InvalidArgumentError):
            differential_cross_section(1.0, self.kin, -1)

    def test_unknown_mode(self):
        with self.assertRaises(InvalidArgumentError):
            differential_cross_section(1.0, self.kin, 0, 'sqrt')


class OpticalTheoremTests(SimpleTestCase):

    def test_unit_imaginary_forward_amplitude(self):
        self.assertAlmostEqual(sigma_total_optical(1j, 2.0), 2 * math.pi)

    def test_negative_value_is_returned_and_logged(self):
        with self.assertLogs('scattering.xsec', level='WARNING'):
            sigma = sigma_total_optical(-1e-12j, 1.0)
        self.assertLess(sigma, 0.0)
        result = optical_result(-1e-12j, make_kinematics(1, 1), 'EA')
        self.assertTrue(result.negative)
        self.assertEqual(result.warnings, ('negative-sigma',))

    def test_result_defaults(self):
        result = CrossSectionResult(sigma_tot=1.5, method='EA')
        self.assertFalse(result.negative)
        self.assertEqual(result.channel_total(), 0)


class EikonalCrossSectionTests(SimpleTestCase):

    def test_static_well(self):
        well = ShakingSquareWell(0, 10, 1)
        kin = make_kinematics(37, 1)
        result = sigma_total_ea(well, kin)
        self.assertEqual(result.method, 'EA')
        self.assertEqual(result.convergence['route'], 'closed-form')
        self.assertLess(relative_difference(result.sigma_tot, static_ea_sigma(10, 37)), 1e-6)

    def test_free_well(self):
        result = sigma_total_ea(ShakingSquareWell(0, 0, 1), make_kinematics(37, 1))
        self.assertEqual(result.sigma_tot, 0.0)
        self.assertEqual(result.convergence['route'], 'free')
        self.assertEqual(result.warnings, ())

    def test_general_axisymmetric_potential(self):
        pot = gaussian_test_potential(strength=2.0)
        result = sigma_total_ea(pot, make_kinematics(20, pot.omega))
        self.assertEqual(result.convergence['route'], 'axisym')
        self.assertGreater(result.sigma_tot, 0.0)

    def test_driving_raises_cross_section_of_empty_well(self):
        kin = make_kinematics(37, 10)
        sigma = [sigma_total_ea(ShakingSquareWell(U0, 0, 10), kin).sigma_tot for U0 in (10.0, 50.0)]
        self.assertGreater(sigma[0], 0.0)
        self.assertGreater(sigma[1], sigma[0])


class UnitRescaleTests(SimpleTestCase):

    def test_cross_sections_scale_with_length_squared(self):
        # the same setup with lengths counted in half-size units
        units = HBAR_2M.rescaled(2.0)
        well, kin = ShakingSquareWell(10, 5, 10), make_kinematics(10.5, 10)
        scaled_well, scaled_kin = ShakingSquareWell(10, 5, 10, r0=2.0), make_kinematics(5.25, 10, units=units)
        for method in (sigma_total_ea, sigma_total_exact):
            with self.subTest(method=method.__name__):
                ratio = method(scaled_well, scaled_kin).sigma_tot / method(well, kin).sigma_tot
                self.assertAlmostEqual(ratio, 4.0, delta=1e-8)


class RelativeDifferenceTests(SimpleTestCase):

    def test_values(self):
        self.assertEqual(relative_difference(0.0, 0.0), 0.0)
        self.assertAlmostEqual(relative_difference(1.0, 2.0), 0.5)
        self.assertEqual(relative_difference(3.0, 3.0), 0.0)
