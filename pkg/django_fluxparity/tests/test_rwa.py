import math

import numpy as np
from django.test import SimpleTestCase
from scipy import special

from django_fluxparity.model import (
    CouplingParams,
    DriveAmplitudes,
    DriveSpec,
    QubitParams,
    ResonatorParams,
    driven_qubit_family,
)
from django_fluxparity.rwa import (
    BLUE_SIDEBAND,
    BLUE_TWO_PHOTON,
    ONE_PHOTON,
    RED_SIDEBAND,
    TWO_PHOTON,
    TWO_PHOTON_BESSEL,
    bessel_j,
    lambda_param,
    multi_photon_parity,
    one_photon_amplitude,
    process_amplitude,
    process_frequency,
    rotating_frame,
    second_order_amplitude,
    sideband_amplitudes,
    transparency_angles,
    two_photon_amplitude,
    two_photon_sideband_amplitude,
)


class BesselTestCase(SimpleTestCase):
    def test_matches_reference_implementation(self):
        for k in range(4):
            for x in np.linspace(0.0, 12.0, 97):
                self.assertLess(abs(bessel_j(k, x) - special.jv(k, x)), 1e-10, msg='J_%d(%g)' % (k, x))

    def test_parity_in_the_argument(self):
        for k in range(4):
            for x in (0.3, 2.0, 11.5):
                self.assertAlmostEqual(bessel_j(k, -x), (-1) ** k * bessel_j(k, x), places=14)

    def test_values_at_origin(self):
        self.assertEqual(bessel_j(0, 0.0), 1.0)
        self.assertEqual(bessel_j(1, 0.0), 0.0)

    def test_first_zero_of_j0(self):
        self.assertLess(abs(bessel_j(0, 2.404825557695773)), 1e-9)

    def test_small_argument_limit(self):
        x = 1e-4
        self.assertAlmostEqual(bessel_j(2, x) / (x * x / 8.0), 1.0, delta=1e-8)

    def test_recurrence(self):
        for x in np.linspace(0.1, 10.0, 50):
            for k in (1, 2):
                residual = bessel_j(k - 1, x) + bessel_j(k + 1, x) - 2.0 * k / x * bessel_j(k, x)
                self.assertLess(abs(residual), 1e-9)

    def test_domain(self):
        with self.assertRaises(ValueError):
            bessel_j(4, 1.0)
        with self.assertRaises(ValueError):
            bessel_j(0, 12.5)


class LambdaTestCase(SimpleTestCase):
    def test_examples(self):
        self.assertAlmostEqual(lambda_param(0.0, 0.7, math.pi / 2.0, 1.0), 0.0)
        self.assertAlmostEqual(lambda_param(0.3, 0.0, math.pi / 2.0, 0.3), 1.0)
        self.assertAlmostEqual(lambda_param(0.3, 0.3, math.pi / 4.0, 2.0), math.sqrt(2.0) * 0.3 / 2.0)

    def test_zero_frequency_rejected(self):
        with self.assertRaises(ValueError):
            lambda_param(0.1, 0.1, 1.0, 0.0)


class OnePhotonTestCase(SimpleTestCase):
    def test_longitudinal_drive_forbidden_at_degeneracy(self):
        self.assertAlmostEqual(one_photon_amplitude(0.2, 0.0, math.pi / 2.0, 1.0).value, 0.0, places=15)

    def test_transversal_drive_at_degeneracy(self):
        amplitude = one_photon_amplitude(0.0, 0.2, math.pi / 2.0, 1.0)
        self.assertAlmostEqual(amplitude.value, -0.05, places=12)
        self.assertAlmostEqual(amplitude.rabi_frequency, 0.1, places=12)

    def test_vanishes_at_transparency(self):
        longitudinal, transversal = 0.3, 0.1
        angles = transparency_angles(longitudinal, transversal)
        for theta in angles[:2]:
            self.assertLess(abs(one_photon_amplitude(longitudinal, transversal, theta, 1.0).value), 1e-12)

    def test_approximation_drops_the_bessel_factor(self):
        exact = one_photon_amplitude(0.5, 0.5, 0.3 * math.pi, 1.0)
        approximate = one_photon_amplitude(0.5, 0.5, 0.3 * math.pi, 1.0, approximate=True)
        lam = lambda_param(0.5, 0.5, 0.3 * math.pi, 1.0)
        self.assertAlmostEqual(exact.value, approximate.value * (bessel_j(0, lam) + bessel_j(2, lam)))
        self.assertNotAlmostEqual(exact.value, approximate.value, places=4)

    def test_prefactor_antisymmetry(self):
        for theta in np.linspace(0.05, math.pi / 2.0 - 0.05, 9):
            forward = one_photon_amplitude(0.3, 0.1, theta, 1.0, approximate=True).value
            swapped = one_photon_amplitude(0.1, 0.3, math.pi / 2.0 - theta, 1.0, approximate=True).value
            self.assertAlmostEqual(forward, -swapped, places=14)


class TwoPhotonTestCase(SimpleTestCase):
    def test_pure_drives_forbidden_at_degeneracy(self):
        self.assertAlmostEqual(two_photon_amplitude(0.0, 0.2, math.pi / 2.0, 0.5).value, 0.0, places=15)
        self.assertAlmostEqual(two_photon_amplitude(0.2, 0.0, math.pi / 2.0, 0.5).value, 0.0, places=15)

    def test_mixed_drive_at_degeneracy(self):
        omega, drive = 0.5, 0.2
        value = two_photon_amplitude(drive, drive, math.pi / 2.0, omega).value
        self.assertAlmostEqual(value, drive * drive / (8.0 * omega), places=14)

    def test_balanced_drive_at_quarter_angle(self):
        self.assertAlmostEqual(two_photon_amplitude(0.2, 0.2, math.pi / 4.0, 0.5).value, 0.0, places=15)

    def test_bessel_variant_agrees_for_weak_drive(self):
        theta = 0.3 * math.pi
        closed = two_photon_amplitude(0.01, 0.01, theta, 0.5).value
        bessel = two_photon_amplitude(0.01, 0.01, theta, 0.5, variant=TWO_PHOTON_BESSEL).value
        self.assertAlmostEqual(bessel / closed, 1.0, delta=1e-3)

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            two_photon_amplitude(0.1, 0.1, 1.0, 0.0)
        with self.assertRaises(ValueError):
            two_photon_amplitude(0.1, 0.1, 1.0, 0.5, variant='floquet')


class SidebandTestCase(SimpleTestCase):
    g_t, gap, omega_r = 0.02, 1.0, 0.45

    def test_transversal_drive_closes_both_sidebands(self):
        red, blue, _ = sideband_amplitudes(0.0, 0.2, math.pi / 2.0, self.g_t, self.gap, self.omega_r)
        self.assertAlmostEqual(red.value, 0.0, places=15)
        self.assertAlmostEqual(blue.value, 0.0, places=15)

    def test_longitudinal_drive_opens_both_sidebands(self):
        red, blue, rates = sideband_amplitudes(0.2, 0.0, math.pi / 2.0, self.g_t, self.gap, self.omega_r)
        self.assertAlmostEqual(red.value, -0.1 * rates.gamma_minus)
        self.assertAlmostEqual(blue.value, -0.1 * rates.gamma_plus)
        self.assertEqual(red.process, RED_SIDEBAND)
        self.assertEqual(blue.process, BLUE_SIDEBAND)

    def test_blue_to_red_ratio(self):
        for theta in (0.2 * math.pi, 0.5 * math.pi, 0.7 * math.pi):
            red, blue, rates = sideband_amplitudes(0.15, 0.05, theta, self.g_t, self.gap, self.omega_r)
            self.assertAlmostEqual(blue.value / red.value, rates.gamma_plus / rates.gamma_minus)

    def test_rates(self):
        _, _, rates = sideband_amplitudes(0.1, 0.1, 1.0, self.g_t, self.gap, self.omega_r)
        self.assertAlmostEqual(rates.gamma_plus, 0.02 / 1.45)
        self.assertAlmostEqual(rates.gamma_minus, 0.02 / 0.55)
        self.assertAlmostEqual(rates.delta_prime, 1.0 + (rates.gamma_plus + rates.gamma_minus) / 2.0)
        self.assertAlmostEqual(rates.dispersive, 0.02 * (rates.gamma_plus + rates.gamma_minus))

    def test_resonant_gap_rejected(self):
        with self.assertRaises(ValueError):
            sideband_amplitudes(0.1, 0.1, 1.0, self.g_t, 0.45, 0.45)
        with self.assertRaises(ValueError):
            sideband_amplitudes(0.1, 0.1, 1.0, self.g_t, -0.45, 0.45)


class TransparencyTestCase(SimpleTestCase):
    def test_balanced_drive(self):
        theta_star, mirror, degenerate = transparency_angles(1.0, 1.0)
        self.assertAlmostEqual(theta_star, math.pi / 4.0)
        self.assertAlmostEqual(mirror, 3.0 * math.pi / 4.0)
        self.assertFalse(degenerate)

    def test_transversal_drive_has_boundary_roots(self):
        theta_star, mirror, _ = transparency_angles(0.0, 1.0)
        self.assertEqual(theta_star, 0.0)
        self.assertEqual(mirror, math.pi)

    def test_strongly_longitudinal_drive(self):
        theta_star, mirror, _ = transparency_angles(30.0, 1.0)
        self.assertAlmostEqual(theta_star / math.pi, 0.48939, places=5)
        self.assertAlmostEqual(mirror / math.pi, 0.51061, places=5)

    def test_longitudinal_drive_is_degenerate(self):
        with self.assertLogs('django_fluxparity.rwa', level='WARNING'):
            angles = transparency_angles(1.0, 0.0)
        self.assertEqual(angles, (math.pi / 2.0, math.pi / 2.0, True))


class RotatingFrameTestCase(SimpleTestCase):
    def _frame(self, theta, amplitudes):
        q = QubitParams.from_angle(theta, omega_q=1.0)
        spec = DriveSpec(omega=1.0)
        family = driven_qubit_family(q, spec, amplitudes)
        return family, rotating_frame(family, q, spec, amplitudes)

    def test_no_drive_is_identity(self):
        family, frame = self._frame(0.3 * math.pi, DriveAmplitudes(0.0, 0.0))
        for t in np.linspace(0.0, 7.0, 11):
            np.testing.assert_allclose(frame.matrix_at(t), family.matrix_at(t), atol=1e-15)

    def test_sigma_z_drive_is_cancelled(self):
        for theta, amplitudes in ((math.pi / 2.0, DriveAmplitudes(0.3, 0.0)),
                                  (0.3 * math.pi, DriveAmplitudes(0.2, 0.1))):
            _, frame = self._frame(theta, amplitudes)
            for t in np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False):
                self.assertLess(abs(frame.sigma_z_projection(t) - 0.5), 1e-10 * 0.3)

    def test_residual_drive_carries_phase_factors(self):
        _, frame = self._frame(math.pi / 2.0, DriveAmplitudes(0.3, 0.0))
        t = 0.7
        np.testing.assert_allclose(np.diag(frame.unitary(t)),
                                   np.exp(-0.5j * frame.phase(t) * np.array([1.0, -1.0])))

    def test_hermitian_at_random_times(self):
        _, frame = self._frame(0.35 * math.pi, DriveAmplitudes(0.2, 0.15))
        for t in np.random.default_rng(3).uniform(0.0, 50.0, 100):
            self.assertTrue(frame.at(t).is_hermitian())


class ProcessTestCase(SimpleTestCase):
    def test_process_frequencies(self):
        self.assertEqual(process_frequency(ONE_PHOTON, 1.0, 0.45), 1.0)
        self.assertEqual(process_frequency(TWO_PHOTON, 1.0, 0.45), 0.5)
        self.assertAlmostEqual(process_frequency(RED_SIDEBAND, 1.0, 0.45), 0.55)
        self.assertAlmostEqual(process_frequency(BLUE_SIDEBAND, 1.0, 0.45), 1.45)
        self.assertAlmostEqual(process_frequency(BLUE_TWO_PHOTON, 1.0, 0.45), 0.725)

    def test_multi_photon_parity(self):
        self.assertEqual([multi_photon_parity(n) for n in range(4)], [1, -1, 1, -1])
        with self.assertRaises(ValueError):
            multi_photon_parity(-1)

    def test_second_order_amplitude(self):
        energies = np.array([0.0, 1.5, 2.0])
        coupling = np.zeros((3, 3))
        coupling[1, 0] = coupling[0, 1] = 1.0
        coupling[2, 1] = coupling[1, 2] = 1.0
        value, omega = second_order_amplitude(energies, coupling, 0, 2)
        self.assertAlmostEqual(omega, 1.0)
        self.assertAlmostEqual(value, -0.5)

    def test_second_order_amplitude_rejects_resonant_intermediate(self):
        energies = np.array([0.0, 1.0, 2.0])
        with self.assertRaises(ValueError):
            second_order_amplitude(energies, np.ones((3, 3)), 0, 2)

    def test_sideband_processes_need_the_resonator(self):
        with self.assertRaises(ValueError):
            process_amplitude(RED_SIDEBAND, QubitParams(1.0), DriveAmplitudes(0.1, 0.0))

    def test_two_photon_sideband_is_open_for_both_drives(self):
        q = QubitParams(1.0)
        r = ResonatorParams(0.45, 1e-3, 1e-4, 4)
        c = CouplingParams(0.02)
        for amplitudes in (DriveAmplitudes(0.05, 0.0), DriveAmplitudes(0.0, 0.05)):
            amplitude = two_photon_sideband_amplitude(q, r, c, amplitudes)
            self.assertEqual(amplitude.process, BLUE_TWO_PHOTON)
            self.assertGreater(abs(amplitude.value), 1e-8)

    def test_two_photon_sideband_needs_room_for_the_photon(self):
        with self.assertRaises(ValueError):
            two_photon_sideband_amplitude(QubitParams(1.0), ResonatorParams(0.45, 1e-3, 1e-4, 1),
                                          CouplingParams(0.02), DriveAmplitudes(0.05, 0.0), n=1)
