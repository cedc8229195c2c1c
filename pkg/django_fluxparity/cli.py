import json
import logging
from typing import Dict, List, NamedTuple

from .analysis import (
    ONE_PHOTON,
    TWO_PHOTON,
    calibration_summary,
    phase_sweep,
    selection_rule_table,
    sideband_map,
    spectrum_map,
    spectrum_oracle_check,
)
from .config import RunConfig
from .exceptions import ConfigurationError, InvariantViolation
from .forms import FORMAT_CSV
from .shortcuts import axis_values, clean_output_name
from .storage import get_result_storage
from .validation import run_checks

logger = logging.getLogger(__name__)

SPECTRUM = 'spectrum'
PHASE_SWEEP = 'phase-sweep'
SIDEBANDS = 'sidebands'
RULES = 'rules'
CALIBRATE = 'calibrate'
VALIDATE = 'validate'
SUBCOMMANDS = (SPECTRUM, PHASE_SWEEP, SIDEBANDS, RULES, CALIBRATE, VALIDATE)

DEFAULT_ORACLE_POINTS = 5


class RunOutcome(NamedTuple):
    files: List[str]
    summary: str


def _dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + '\n'


class FluxParityCLI:
    @classmethod
    def run(cls, subcommand: str, config: RunConfig) -> RunOutcome:
        """
        Run one subcommand and write its results plus a metadata file
        echoing the resolved configuration.

        :param subcommand: one of SUBCOMMANDS
        :param config: the validated run configuration
        :return: the stored file names and a short text summary
        """
        handler = {
            SPECTRUM: cls.spectrum,
            PHASE_SWEEP: cls.phase_sweep,
            SIDEBANDS: cls.sidebands,
            RULES: cls.rules,
            CALIBRATE: cls.calibrate,
            VALIDATE: cls.validate,
        }.get(subcommand)
        if handler is None:
            raise ConfigurationError('Unknown subcommand %r' % subcommand, field='subcommand')

        logger.info('Running %s (engine %s)', subcommand, config.engine)
        stem = '%s-%s' % (clean_output_name(config.output_name) or 'fluxparity', subcommand)
        storage = get_result_storage(config.output_directory)

        outputs, summary, extra = handler(config)
        files = [storage.write_text('%s.%s' % (stem, extension), text) for extension, text in outputs]

        metadata = {
            'subcommand': subcommand,
            'config': config.document,
            'outputs': files,
        }
        metadata.update(extra)
        files.append(storage.write_text('%s.meta.json' % stem, _dumps(metadata)))
        for name in files:
            logger.info('Wrote %s', storage.path(name))

        if subcommand == VALIDATE and not extra['passed']:
            raise InvariantViolation('Validation failed: %s' % summary, checks=extra['checks'])
        return RunOutcome(files, summary)

    @staticmethod
    def _grid_output(config: RunConfig, grid):
        if config.output_format == FORMAT_CSV:
            return [('csv', grid.to_csv())]
        return [('json', grid.to_json())]

    @classmethod
    def spectrum(cls, config: RunConfig):
        grid = spectrum_map(
            config.kind, config.params, config.amplitudes, config.theta_axis, config.frequency_axis,
            prefactor=config.linewidth_prefactor, multiplier=config.multiplier,
        )
        extra = {}
        points = config.oracle_points or (DEFAULT_ORACLE_POINTS if config.use_oracle else 0)
        if points:
            if config.kind not in (ONE_PHOTON, TWO_PHOTON):
                raise ConfigurationError('Oracle spot checks cover one- and two-photon maps only',
                                         field='spectrum.kind')
            values = config.theta_axis.values
            thetas = axis_values(values[0], values[-1], points) if points > 1 else (values[0],)
            checks = spectrum_oracle_check(config.kind, config.params, config.amplitudes, thetas,
                                           multiplier=config.multiplier,
                                           steps_per_period=config.steps_per_period)
            extra['oracle_checks'] = [dict(check._asdict(), agrees=check.agrees) for check in checks]
            if not all(check.agrees for check in checks):
                raise InvariantViolation('Oracle and analytic spectrum disagree', checks=extra['oracle_checks'])

        summary = '%s map, %d×%d cells, peak at θ=%gπ' % (
            config.kind, len(config.theta_axis), len(config.frequency_axis),
            config.theta_axis.values[int(grid.values.max(axis=1).argmax())])
        return cls._grid_output(config, grid), summary, extra

    @classmethod
    def phase_sweep(cls, config: RunConfig):
        grid = phase_sweep(config.params, config.phi_axis, drive=config.drive, use_oracle=config.use_oracle,
                           thermal_model=config.thermal_model, steps_per_period=config.steps_per_period)
        summary = 'p_e between %.6g and %.6g over %d phases' % (grid.min_value, grid.max_value, len(config.phi_axis))
        return cls._grid_output(config, grid), summary, {}

    @classmethod
    def sidebands(cls, config: RunConfig):
        grid = sideband_map(config.params, config.amplitudes, config.theta_axis, config.frequency_axis,
                            prefactor=config.linewidth_prefactor)
        summary = 'sideband overlay, %d×%d cells' % (len(config.theta_axis), len(config.frequency_axis))
        return cls._grid_output(config, grid), summary, {}

    @classmethod
    def rules(cls, config: RunConfig):
        if not config.drive.omega_max > 0.0:
            raise ConfigurationError('Selection rules need a nonzero drive amplitude', field='drive.amplitude_hz')
        table = selection_rule_table(params=config.params, omega_max=config.drive.omega_max, include_detuned=True)
        text = table.to_text()
        output = ('txt', text) if config.output_format == FORMAT_CSV else ('json', table.to_json())
        return [output], text.rstrip('\n'), {}

    @classmethod
    def calibrate(cls, config: RunConfig):
        values: Dict[str, float] = calibration_summary(config.params)
        summary = '\n'.join('%s = %.6g' % item for item in sorted(values.items()))
        return [('json', _dumps(values))], summary, {}

    @classmethod
    def validate(cls, config: RunConfig):
        results = run_checks()
        checks = [result.as_dict() for result in results]
        passed = all(result.passed for result in results)
        summary = '\n'.join('%s %s: %s' % ('PASS' if r.passed else 'FAIL', r.name, r.detail) for r in results)
        return [('json', _dumps({'passed': passed, 'checks': checks}))], summary, {'passed': passed, 'checks': checks}
