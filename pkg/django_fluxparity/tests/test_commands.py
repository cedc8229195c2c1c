import json
import os
import shutil
import tempfile
from io import StringIO

from django.core.management import call_command
from django.test import SimpleTestCase, override_settings

SMALL_GRID = [
    'sweep.theta.start=0.3',
    'sweep.theta.stop=0.7',
    'sweep.theta.points=5',
    'sweep.frequency.start=7e9',
    'sweep.frequency.stop=12e9',
    'sweep.frequency.points=11',
]


class FluxParityCommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tempdir = tempfile.mkdtemp()
        self.override = override_settings(DJANGO_FLUXPARITY={'RESULTS_PATH': self.tempdir, 'WORKERS': 1})
        self.override.enable()

    def tearDown(self):
        self.override.disable()
        shutil.rmtree(self.tempdir)

    def call(self, subcommand, *overrides):
        out = StringIO()
        call_command('fluxparity', subcommand, overrides=list(overrides), stdout=out, stderr=StringIO())
        return out.getvalue()

    def call_failing(self, subcommand, *overrides):
        err = StringIO()
        with self.assertRaises(SystemExit) as cm:
            call_command('fluxparity', subcommand, overrides=list(overrides), stdout=StringIO(), stderr=err)
        return cm.exception.code, json.loads(err.getvalue())

    def read(self, name):
        with open(os.path.join(self.tempdir, name), encoding='utf-8') as fh:
            return fh.read()

    def test_calibrate(self):
        out = self.call('calibrate')
        self.assertEqual(sorted(os.listdir(self.tempdir)),
                         ['fluxparity-calibrate.json', 'fluxparity-calibrate.meta.json'])
        values = json.loads(self.read('fluxparity-calibrate.json'))
        self.assertAlmostEqual(values['critical_photon_number'], 2916.0, places=6)
        self.assertAlmostEqual(values['stark_shift_hz'] / 1e6, 24.4, delta=0.05)
        self.assertIn('critical_photon_number = 2916', out)
        self.assertIn('wrote fluxparity-calibrate.json', out)

    def test_metadata_echoes_config(self):
        self.call('calibrate', 'system.qubit.bias_hz=1e9')
        metadata = json.loads(self.read('fluxparity-calibrate.meta.json'))
        self.assertEqual(metadata['subcommand'], 'calibrate')
        self.assertEqual(metadata['config']['system']['qubit']['bias_hz'], 1e9)
        self.assertEqual(metadata['outputs'], ['fluxparity-calibrate.json'])

    def test_rules_table(self):
        self.call('rules', 'system.resonator.n_max=4')
        lines = self.read('fluxparity-rules.txt').splitlines()
        self.assertEqual(len(lines), 20)
        self.assertTrue(lines[0].startswith('one-photon / transversal / allowed'))
        self.assertTrue(lines[1].startswith('two-photon / transversal / forbidden'))

    def test_rules_with_defaults(self):
        out = self.call('rules')
        self.assertIn('red sideband / transversal / forbidden', out)
        self.assertIn('red sideband / transversal / forbidden', self.read('fluxparity-rules.txt'))

    def test_cold_phase_sweep(self):
        self.call('phase-sweep', 'drive.temperature_k=0')
        lines = self.read('fluxparity-phase-sweep.csv').splitlines()
        self.assertEqual(len(lines), 65)
        p_e = [float(line.split(',')[2]) for line in lines[1:]]
        self.assertLess(min(p_e), 1e-3)
        self.assertGreater(max(p_e), 0.45)

    def test_rules_need_a_drive(self):
        code, payload = self.call_failing('rules', 'drive.amplitude_hz=0')
        self.assertEqual(code, 1)
        self.assertEqual(payload['field'], 'drive.amplitude_hz')

    def test_spectrum_csv(self):
        self.call('spectrum', *SMALL_GRID)
        lines = self.read('fluxparity-spectrum.csv').splitlines()
        self.assertEqual(lines[0], 'theta_pi,frequency_hz,intensity')
        self.assertEqual(len(lines), 1 + 5 * 11)
        self.assertEqual(lines[1].split(','), ['0.29999999999999999', '7000000000', lines[1].split(',')[2]])

    def test_reruns_are_identical(self):
        self.call('spectrum', *SMALL_GRID)
        first = self.read('fluxparity-spectrum.csv')
        self.call('spectrum', *SMALL_GRID)
        self.assertEqual(self.read('fluxparity-spectrum.csv'), first)
        self.assertEqual(len(os.listdir(self.tempdir)), 2)

    def test_sidebands_json(self):
        self.call('sidebands', 'output.format=json', 'output.name=overlay', 'system.resonator.n_max=3', *SMALL_GRID)
        document = json.loads(self.read('overlay-sidebands.json'))
        self.assertEqual(document['value_label'], 'intensity')
        self.assertEqual(document['metadata']['processes'], ['red_sideband', 'blue_sideband', 'blue_two_photon'])

    def test_phase_sweep(self):
        out = self.call('phase-sweep', 'sweep.phi.points=16')
        lines = self.read('fluxparity-phase-sweep.csv').splitlines()
        self.assertEqual(lines[0], 'phi_rad,frequency_hz,p_e')
        self.assertEqual(len(lines), 17)
        p_e = [float(line.split(',')[2]) for line in lines[1:]]
        self.assertAlmostEqual(p_e[0], 0.0429, delta=1e-3)
        self.assertGreater(max(p_e), 0.45)
        self.assertIn('over 16 phases', out)

    def test_bad_override_exits_with_payload(self):
        code, payload = self.call_failing('calibrate', 'system.qubit.gap_hz=-5')
        self.assertEqual(code, 1)
        self.assertEqual(payload['error'], 'configuration')
        self.assertEqual(payload['field'], 'system.qubit.gap_hz')
        self.assertEqual(os.listdir(self.tempdir), [])

    def test_oracle_needs_propagation(self):
        code, payload = self.call_failing('phase-sweep', 'engine=oracle')
        self.assertEqual(code, 1)
        self.assertEqual(payload['field'], 'propagation')

    def test_oracle_spot_checks_reject_sidebands(self):
        code, payload = self.call_failing('spectrum', 'spectrum.kind=red_sideband', 'spectrum.oracle_points=2',
                                          *SMALL_GRID)
        self.assertEqual(code, 1)
        self.assertEqual(payload['field'], 'spectrum.kind')
        self.assertEqual(os.listdir(self.tempdir), [])

    def test_missing_config_file(self):
        err = StringIO()
        with self.assertRaises(SystemExit) as cm:
            call_command('fluxparity', 'calibrate', os.path.join(self.tempdir, 'missing.json'),
                         stdout=StringIO(), stderr=err)
        self.assertEqual(cm.exception.code, 1)
        self.assertEqual(json.loads(err.getvalue())['field'], 'config')
