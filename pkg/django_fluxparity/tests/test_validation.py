from django.test import SimpleTestCase

from django_fluxparity.validation import (
    CHECKS,
    TWO_PHOTON_THETAS,
    check_calibration,
    check_numerics,
    check_rwa_against_oracle,
    check_selection_rules,
    check_transparency,
    check_two_photon_parity,
    run_checks,
)


class ValidationTestCase(SimpleTestCase):
    def test_selection_rules(self):
        passed, detail = check_selection_rules()
        self.assertTrue(passed, detail)
        self.assertEqual(detail, '10 degeneracy rows match')

    def test_transparency(self):
        passed, detail = check_transparency()
        self.assertTrue(passed, detail)
        self.assertTrue(detail.startswith('roots and oracle dips at atan(r)'))

    def test_rwa_against_oracle(self):
        passed, detail = check_rwa_against_oracle()
        self.assertTrue(passed, detail)
        self.assertLess(float(detail.rsplit(' ', 1)[1]), 0.05)

    def test_two_photon_parity(self):
        passed, detail = check_two_photon_parity()
        self.assertTrue(passed, detail)
        self.assertIn('matched at %d angles' % len(TWO_PHOTON_THETAS), detail)

    def test_calibration(self):
        passed, detail = check_calibration()
        self.assertTrue(passed, detail)

    def test_numerics(self):
        passed, detail = check_numerics()
        self.assertTrue(passed, detail)
        self.assertTrue(detail.startswith('Bessel residual'))

    def test_run_checks(self):
        results = run_checks(['calibration', 'phase_sweep'])
        self.assertEqual([result.name for result in results], ['calibration', 'phase_sweep'])
        for result in results:
            self.assertTrue(result.passed, result.detail)
        self.assertEqual(set(results[0].as_dict()), {'name', 'passed', 'detail'})

    def test_every_check_is_registered(self):
        self.assertEqual([name for name, _ in CHECKS], [
            'selection_rules', 'transparency', 'rwa_vs_oracle', 'phase_sweep',
            'two_photon_parity', 'calibration', 'numerics',
        ])

    def test_unknown_check(self):
        with self.assertRaises(ValueError):
            run_checks(['selection_rules', 'warp_drive'])
