import json
import math
import os
import shutil
import tempfile

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from django_fluxparity.config import default_document, load_run_config
from django_fluxparity.exceptions import ConfigurationError, ConvergenceError, InvariantViolation
from django_fluxparity.fields import AngularFrequencyField, PhaseField
from django_fluxparity.forms import DecoherenceForm, PropagationForm, ThetaAxisForm
from django_fluxparity.shortcuts import axis_values, clean_output_name, format_float, parallel_map
from django_fluxparity.storage import ResultStorage
from django_fluxparity.util import TWO_PI, hz_to_angular
from django_fluxparity.validators import (
    OpenIntervalValidator,
    PositiveValidator,
    validate_bloch_angle,
    validate_non_negative,
    validate_positive,
)


class RunConfigTestCase(SimpleTestCase):
    def setUp(self):
        self.tempdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tempdir)

    def write_config(self, text):
        path = os.path.join(self.tempdir, 'run.json')
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(text)
        return path

    def assertConfigError(self, field, path=None, overrides=()):
        with self.assertRaises(ConfigurationError) as cm:
            load_run_config(path, overrides)
        self.assertEqual(cm.exception.field, field)
        self.assertEqual(cm.exception.code, 1)
        return cm.exception

    def test_defaults(self):
        config = load_run_config()
        self.assertAlmostEqual(config.params.qubit.gap, hz_to_angular(8.2e9))
        self.assertEqual(config.params.qubit.bias, 0.0)
        self.assertEqual(config.params.resonator.n_max, 8)
        self.assertAlmostEqual(config.drive.omega, config.params.qubit.omega_q)
        self.assertEqual(config.engine, 'analytic')
        self.assertFalse(config.use_oracle)
        self.assertIsNone(config.steps_per_period)
        self.assertEqual(len(config.theta_axis), 41)
        self.assertEqual(len(config.phi_axis), 64)
        self.assertEqual(config.kind, 'one_photon')
        self.assertEqual((config.output_name, config.output_format), ('fluxparity', 'csv'))
        self.assertEqual(config.document, default_document())

    def test_default_amplitudes_are_transversal(self):
        amplitudes = load_run_config().amplitudes
        self.assertAlmostEqual(amplitudes.transversal, hz_to_angular(10e6))
        self.assertLess(amplitudes.longitudinal, 1e-6)

    def test_overrides(self):
        config = load_run_config(overrides=[
            'system.qubit.bias_hz=-1e9',
            'spectrum.kind=two_photon',
            'drive.phase_rad=7',
            'output.format=json',
        ])
        self.assertAlmostEqual(config.params.qubit.bias, hz_to_angular(-1e9))
        self.assertEqual(config.kind, 'two_photon')
        self.assertAlmostEqual(config.drive.phi, 7.0 - TWO_PI)
        self.assertEqual(config.output_format, 'json')
        self.assertEqual(config.document['system']['qubit']['bias_hz'], -1e9)

    def test_oracle_engine(self):
        self.assertConfigError('propagation', overrides=['engine=oracle'])
        config = load_run_config(overrides=['engine=oracle', 'propagation.steps_per_period=100'])
        self.assertTrue(config.use_oracle)
        self.assertEqual(config.steps_per_period, 100)

    def test_coarse_step_rejected(self):
        self.assertConfigError('propagation.steps_per_period', overrides=['propagation.steps_per_period=10'])

    def test_unknown_key(self):
        self.assertConfigError('system.qubit.gap', overrides=['system.qubit.gap=1'])
        self.assertConfigError('sweeps', overrides=['sweeps.theta.start=0.2'])

    def test_type_mismatch(self):
        self.assertConfigError('system.resonator.n_max', overrides=['system.resonator.n_max=many'])
        self.assertConfigError('system.qubit.gap_hz', overrides=['system.qubit.gap_hz=[1, 2]'])
        self.assertConfigError('system.qubit', overrides=['system.qubit=5'])
        self.assertConfigError('spectrum.kind', overrides=['spectrum.kind=three_photon'])

    def test_out_of_range_values(self):
        self.assertConfigError('system.qubit.gap_hz', overrides=['system.qubit.gap_hz=-1'])
        self.assertConfigError('sweep.theta.start', overrides=['sweep.theta.start=0'])
        self.assertConfigError('sweep.phi', overrides=['sweep.phi.stop=0'])
        self.assertConfigError('drive.temperature_k', overrides=['drive.temperature_k=-0.1'])

    def test_t2_bounded_by_t1(self):
        error = self.assertConfigError('system.decoherence', overrides=['system.decoherence.t2_s=1e-5'])
        self.assertIn('T2', error.reason)

    def test_malformed_override(self):
        self.assertConfigError('engine', overrides=['engine'])

    def test_config_file(self):
        path = self.write_config(json.dumps({
            'system': {'qubit': {'gap_hz': 5e9}},
            'drive': {'phase_rad': 0.0},
        }))
        config = load_run_config(path, ['system.qubit.bias_hz=1e9'])
        self.assertAlmostEqual(config.params.qubit.gap, hz_to_angular(5e9))
        self.assertAlmostEqual(config.params.qubit.bias, hz_to_angular(1e9))
        self.assertEqual(config.drive.phi, 0.0)

    def test_config_file_must_set_gap(self):
        path = self.write_config(json.dumps({'drive': {'phase_rad': 0.0}}))
        self.assertConfigError('system.qubit.gap_hz', path)

    def test_duplicate_keys(self):
        path = self.write_config('{"system": {"qubit": {"gap_hz": 5e9, "gap_hz": 6e9}}}')
        self.assertConfigError('gap_hz', path)

    def test_unreadable_config(self):
        self.assertConfigError('config', self.write_config('{"system": '))
        self.assertConfigError('config', self.write_config('[1, 2]'))
        self.assertConfigError('config', os.path.join(self.tempdir, 'missing.json'))


class FormTestCase(SimpleTestCase):
    def test_decoherence_form(self):
        self.assertTrue(DecoherenceForm(data={'t1_s': 2.6e-6, 't2_s': 0.1e-6}).is_valid())
        self.assertTrue(DecoherenceForm(data={'t1_s': 1e-6, 't2_s': 2e-6}).is_valid())
        form = DecoherenceForm(data={'t1_s': 1e-6, 't2_s': 2.1e-6})
        self.assertFalse(form.is_valid())
        self.assertIn('__all__', form.errors)

    def test_theta_axis_form(self):
        self.assertTrue(ThetaAxisForm(data={'start': 0.1, 'stop': 0.9, 'points': 9}).is_valid())
        self.assertFalse(ThetaAxisForm(data={'start': 0.1, 'stop': 1.0, 'points': 9}).is_valid())
        self.assertFalse(ThetaAxisForm(data={'start': 0.5, 'stop': 0.5, 'points': 9}).is_valid())
        self.assertFalse(ThetaAxisForm(data={'start': 0.1, 'stop': 0.9, 'points': 1}).is_valid())

    def test_propagation_form(self):
        self.assertTrue(PropagationForm(data={}).is_valid())
        self.assertTrue(PropagationForm(data={'steps_per_period': 50}).is_valid())
        self.assertFalse(PropagationForm(data={'steps_per_period': 49}).is_valid())


class FieldTestCase(SimpleTestCase):
    def test_angular_frequency_field(self):
        field = AngularFrequencyField()
        self.assertAlmostEqual(field.clean('1'), TWO_PI)
        self.assertAlmostEqual(field.clean(8.2e9), hz_to_angular(8.2e9))
        with self.assertRaises(ValidationError):
            field.clean(0.0)
        with self.assertRaises(ValidationError):
            field.clean('fast')

    def test_signed_and_zero_frequencies(self):
        self.assertAlmostEqual(AngularFrequencyField(allow_negative=True).clean(-1.0), -TWO_PI)
        self.assertEqual(AngularFrequencyField(allow_zero=True).clean(0.0), 0.0)
        self.assertIsNone(AngularFrequencyField(required=False).clean(None))

    def test_phase_field_wraps(self):
        field = PhaseField()
        self.assertAlmostEqual(field.clean(-math.pi / 2.0), 1.5 * math.pi)
        self.assertAlmostEqual(field.clean(3.0 * math.pi), math.pi)
        self.assertEqual(field.clean(0.0), 0.0)


class ValidatorTestCase(SimpleTestCase):
    def test_positive(self):
        validate_positive(1e-30)
        validate_positive(None)
        validate_non_negative(0.0)
        with self.assertRaises(ValidationError):
            validate_positive(0.0)
        with self.assertRaises(ValidationError):
            validate_non_negative(-1.0)

    def test_open_interval(self):
        validate_bloch_angle(0.5)
        for value in (0.0, 1.0, -0.1):
            with self.assertRaises(ValidationError):
                validate_bloch_angle(value)
        OpenIntervalValidator(0.0, 0.5, include_upper=True)(0.5)

    def test_equality(self):
        self.assertEqual(PositiveValidator(), validate_positive)
        self.assertNotEqual(PositiveValidator(allow_zero=True), validate_positive)
        self.assertEqual(OpenIntervalValidator(0.0, 1.0), OpenIntervalValidator(0.0, 1.0))
        self.assertNotEqual(OpenIntervalValidator(0.0, 1.0), OpenIntervalValidator(0.0, 1.0, include_upper=True))


class ErrorPayloadTestCase(SimpleTestCase):
    def test_configuration_error(self):
        error = ConfigurationError('bad step', field='propagation.dt', suggested_dt=0.02)
        self.assertEqual(str(error), 'bad step')
        self.assertEqual(error.payload(), {
            'error': 'configuration',
            'code': 1,
            'message': 'bad step',
            'field': 'propagation.dt',
            'suggested_dt': 0.02,
        })

    def test_codes(self):
        self.assertEqual(InvariantViolation('trace').code, 2)
        error = ConvergenceError('drift', drift=0.01)
        self.assertEqual(error.code, 3)
        self.assertEqual(error.payload()['error'], 'non_convergence')

    def test_reason_from_source_error(self):
        error = ConfigurationError(source_error=ValueError('negative gap'))
        self.assertEqual(error.reason, 'negative gap')


class ShortcutsTestCase(SimpleTestCase):
    def test_clean_output_name(self):
        self.assertEqual(clean_output_name('../etc/pass wd'), 'etcpasswd')
        self.assertEqual(clean_output_name('run_1.v2'), 'run_1.v2')

    def test_axis_values(self):
        self.assertEqual(axis_values(0.0, 1.0, 3), (0.0, 0.5, 1.0))
        with self.assertRaises(ValueError):
            axis_values(0.0, 1.0, 1)
        with self.assertRaises(ValueError):
            axis_values(1.0, 1.0, 5)

    def test_format_float(self):
        self.assertEqual(format_float(0.1), '0.10000000000000001')
        self.assertEqual(format_float(8.2e9), '8200000000')

    def test_parallel_map_keeps_order(self):
        items = [-3, 1, -2, 5]
        self.assertEqual(parallel_map(abs, items, workers=1), [3, 1, 2, 5])
        self.assertEqual(parallel_map(abs, items, workers=2), [3, 1, 2, 5])


class ResultStorageTestCase(SimpleTestCase):
    def setUp(self):
        self.tempdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tempdir)

    def test_existing_files_are_replaced(self):
        storage = ResultStorage(location=self.tempdir)
        self.assertEqual(storage.write_text('grid.csv', 'first\n'), 'grid.csv')
        self.assertEqual(storage.write_text('grid.csv', 'second\n'), 'grid.csv')
        with storage.open('grid.csv') as fh:
            self.assertEqual(fh.read(), b'second\n')
        self.assertEqual(os.listdir(self.tempdir), ['grid.csv'])
