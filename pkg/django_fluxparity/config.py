"""
RunConfig ingestion: a single JSON document in lab units (Hz, seconds,
kelvin), overlaid on the DJANGO_FLUXPARITY defaults, patched by dotted
`key=value` overrides and validated section by section with Django forms.
"""
import copy
import json
import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .analysis import FREQUENCY_LABEL, PHI_LABEL, THETA_LABEL, SweepAxis, SystemParams
from .dynamics import DecoherenceParams
from .exceptions import ConfigurationError
from .forms import (
    ENGINE_ORACLE,
    CouplingForm,
    DecoherenceForm,
    DriveForm,
    EngineForm,
    OutputForm,
    PropagationForm,
    QubitForm,
    ResonatorForm,
    SpectrumForm,
    SweepAxisForm,
    ThetaAxisForm,
)
from .model import CouplingParams, DriveAmplitudes, DriveSpec, QubitParams, ResonatorParams, drive_amplitudes
from .settings import fluxparity_settings as settings

logger = logging.getLogger(__name__)

SECTION_FORMS = {
    'system.qubit': QubitForm,
    'system.resonator': ResonatorForm,
    'system.coupling': CouplingForm,
    'system.decoherence': DecoherenceForm,
    'drive': DriveForm,
    'sweep.theta': ThetaAxisForm,
    'sweep.frequency': SweepAxisForm,
    'sweep.phi': SweepAxisForm,
    'spectrum': SpectrumForm,
    'propagation': PropagationForm,
    'output': OutputForm,
}
SCALAR_FORMS = {
    'engine': EngineForm,
}

REQUIRED_WITH_FILE = ('system', 'qubit', 'gap_hz')


def default_document() -> dict:
    """
    The full configuration document with every default filled in, in lab
    units. The propagation block has no defaults; it is only present when
    given.
    """
    return {
        'system': {
            'qubit': {
                'gap_hz': settings.QUBIT_GAP_HZ,
                'bias_hz': settings.QUBIT_BIAS_HZ,
            },
            'resonator': {
                'frequency_hz': settings.RESONATOR_FREQUENCY_HZ,
                'kappa_x_hz': settings.KAPPA_X_HZ,
                'kappa_i_hz': settings.KAPPA_I_HZ,
                'n_max': settings.N_MAX,
            },
            'coupling': {
                'g_t_hz': settings.COUPLING_T_HZ,
                'g_l_hz': settings.COUPLING_L_HZ,
            },
            'decoherence': {
                't1_s': settings.T1_S,
                't2_s': settings.T2_S,
            },
        },
        'drive': {
            'amplitude_hz': settings.DRIVE_AMPLITUDE_HZ,
            'phase_rad': math.pi,
            'imbalance_db': settings.IMBALANCE_DB,
            'leakage_db': settings.LEAKAGE_DB,
            'temperature_k': settings.EFFECTIVE_TEMPERATURE_K,
            'thermal_model': 'population',
        },
        'sweep': {
            'theta': {'start': 0.1, 'stop': 0.9, 'points': 41},
            'frequency': {'start': 1e9, 'stop': 30e9, 'points': 291},
            'phi': {'start': 0.0, 'stop': 2.0 * math.pi, 'points': 64},
        },
        'spectrum': {
            'kind': 'one_photon',
            'linewidth_prefactor': settings.LINEWIDTH_PREFACTOR,
            'multiplier': None,
            'oracle_points': 0,
        },
        'output': {
            'directory': '',
            'name': 'fluxparity',
            'format': 'csv',
        },
        'engine': 'analytic',
    }


def _schema() -> dict:
    schema = {}
    for path, form_class in SECTION_FORMS.items():
        node = schema
        for part in path.split('.'):
            node = node.setdefault(part, {})
        node.update({name: None for name in form_class.base_fields})
    for name in SCALAR_FORMS:
        schema[name] = None
    return schema


def _reject_duplicates(pairs):
    keys = [key for key, _ in pairs]
    duplicates = sorted({key for key in keys if keys.count(key) > 1})
    if duplicates:
        raise ConfigurationError('Duplicate keys in config: %s' % ', '.join(duplicates), field=duplicates[0])
    return dict(pairs)


def read_document(path: str) -> dict:
    try:
        with open(path, encoding='utf-8') as fh:
            document = json.load(fh, object_pairs_hook=_reject_duplicates)
    except OSError as e:
        raise ConfigurationError('Cannot read config file %s' % path, field='config', source_error=e)
    except ValueError as e:
        raise ConfigurationError('Config file %s is not valid JSON: %s' % (path, e), field='config')

    if not isinstance(document, dict):
        raise ConfigurationError('The config document must be a JSON object', field='config')
    return document


def _merge(base: dict, document: dict, schema: dict, prefix: str = ''):
    """
    Overlay `document` onto `base` in place, rejecting keys the schema does
    not know.
    """
    for key, value in document.items():
        dotted = prefix + key
        if key not in schema:
            raise ConfigurationError('Unknown config key %s' % dotted, field=dotted)
        if schema[key] is None:
            if isinstance(value, (dict, list)):
                raise ConfigurationError('%s must be a scalar' % dotted, field=dotted)
            base[key] = value
            continue
        if not isinstance(value, dict):
            raise ConfigurationError('%s must be an object' % dotted, field=dotted)
        _merge(base.setdefault(key, {}), value, schema[key], dotted + '.')


def _parse_override(item: str):
    key, sep, raw = item.partition('=')
    key = key.strip()
    if not sep or not key:
        raise ConfigurationError('Overrides take the form key=value, got %r' % item, field=key or item)
    try:
        value = json.loads(raw)
    except ValueError:
        value = raw
    return key, value


def apply_overrides(document: dict, overrides: Iterable[str], schema: dict = None):
    schema = schema or _schema()
    for item in overrides:
        key, value = _parse_override(item)
        patch = value
        for part in reversed(key.split('.')):
            patch = {part: patch}
        _merge(document, patch, schema)


def _lookup(document: dict, path: str):
    node = document
    for part in path.split('.'):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def _clean_section(document: dict, path: str, form_class, scalar: bool = False) -> dict:
    data = _lookup(document, path)
    if scalar:
        data = {path: data}
    form = form_class(data=data or {})
    if not form.is_valid():
        name, errors = next(iter(form.errors.items()))
        dotted = path if scalar or name == '__all__' else '%s.%s' % (path, name)
        raise ConfigurationError('%s: %s' % (dotted, ' '.join(errors)), field=dotted)
    return form.cleaned_data


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    drive: DriveSpec
    thermal_model: str
    theta_axis: SweepAxis
    frequency_axis: SweepAxis
    phi_axis: SweepAxis
    kind: str
    linewidth_prefactor: float
    multiplier: Optional[float]
    oracle_points: int
    engine: str
    steps_per_period: Optional[int]
    output_directory: str
    output_name: str
    output_format: str
    document: dict

    @property
    def use_oracle(self) -> bool:
        return self.engine == ENGINE_ORACLE

    @property
    def amplitudes(self) -> DriveAmplitudes:
        """
        Coherent drive amplitudes at the configured phase, without the
        thermal floor.
        """
        return drive_amplitudes(replace(self.drive, temperature=0.0), self.params.qubit.omega_q)


def _axis(label: str, cleaned: dict) -> SweepAxis:
    return SweepAxis.linspace(label, cleaned['start'], cleaned['stop'], cleaned['points'])


def build_run_config(document: dict) -> RunConfig:
    cleaned = {path: _clean_section(document, path, form) for path, form in SECTION_FORMS.items()}
    engine = _clean_section(document, 'engine', EngineForm, scalar=True)['engine']
    if engine == ENGINE_ORACLE and _lookup(document, 'propagation') is None:
        raise ConfigurationError('engine=oracle requires a propagation block', field='propagation')

    qubit, resonator = cleaned['system.qubit'], cleaned['system.resonator']
    coupling, decoherence = cleaned['system.coupling'], cleaned['system.decoherence']
    drive = cleaned['drive']

    section = 'system'
    try:
        section = 'system.qubit'
        q = QubitParams(qubit['gap_hz'], qubit['bias_hz'])
        section = 'system.resonator'
        r = ResonatorParams(resonator['frequency_hz'], resonator['kappa_x_hz'], resonator['kappa_i_hz'],
                            resonator['n_max'])
        section = 'system.coupling'
        c = CouplingParams(coupling['g_t_hz'], coupling['g_l_hz'])
        section = 'system.decoherence'
        dec = DecoherenceParams.from_times(decoherence['t1_s'], decoherence['t2_s'], kappa=r.kappa_total)
        section = 'drive'
        spec = DriveSpec(
            omega=q.omega_q,
            phi=drive['phase_rad'],
            omega_max=drive['amplitude_hz'],
            imbalance_db=drive['imbalance_db'],
            temperature=drive['temperature_k'],
            leakage_db=drive['leakage_db'],
        )
    except ValueError as e:
        raise ConfigurationError('%s: %s' % (section, e), field=section, source_error=e)

    spectrum, output = cleaned['spectrum'], cleaned['output']
    return RunConfig(
        params=SystemParams(q, r, c, dec),
        drive=spec,
        thermal_model=drive['thermal_model'],
        theta_axis=_axis(THETA_LABEL, cleaned['sweep.theta']),
        frequency_axis=_axis(FREQUENCY_LABEL, cleaned['sweep.frequency']),
        phi_axis=_axis(PHI_LABEL, cleaned['sweep.phi']),
        kind=spectrum['kind'],
        linewidth_prefactor=spectrum['linewidth_prefactor'],
        multiplier=spectrum['multiplier'],
        oracle_points=spectrum['oracle_points'],
        engine=engine,
        steps_per_period=cleaned['propagation']['steps_per_period'],
        output_directory=output['directory'],
        output_name=output['name'],
        output_format=output['format'],
        document=copy.deepcopy(document),
    )


def load_run_config(path: str = None, overrides: Iterable[str] = ()) -> RunConfig:
    """
    :param path: optional JSON config file; when given it must set
        system.qubit.gap_hz
    :param overrides: dotted `key=value` strings applied after the file
    """
    schema = _schema()
    document = default_document()
    if path:
        node = document
        for part in REQUIRED_WITH_FILE[:-1]:
            node = node[part]
        del node[REQUIRED_WITH_FILE[-1]]
        _merge(document, read_document(path), schema)
    apply_overrides(document, overrides, schema)

    logger.debug('Resolved config document: %s', json.dumps(document, sort_keys=True))
    return build_run_config(document)
