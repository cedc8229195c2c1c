"""
Figure-level synthesis on top of the amplitude and propagation layers:
selection-rule tables, spectrum and sideband maps, resonant phase sweeps
and the calibration formulas used to convert lab quantities.
"""
import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit

from .dynamics import DecoherenceParams, analytic_steady_state_pe, qubit_steady_state
from .exceptions import InvariantViolation
from .model import (
    CouplingParams,
    DriveAmplitudes,
    DriveSpec,
    QubitParams,
    ResonatorParams,
    drive_amplitudes,
    drive_operator,
    stray_population,
)
from .operators import (
    EXCITED,
    GROUND,
    PARITY_NONE,
    HilbertSpace,
    basis_state,
    embed_qubit,
    parity_classify,
    parity_ops,
    parity_sign,
    state_parity,
)
from .rwa import (
    BLUE_SIDEBAND,
    BLUE_TWO_PHOTON,
    ONE_PHOTON,
    PROCESSES,
    RED_SIDEBAND,
    TWO_PHOTON,
    one_photon_amplitude,
    process_amplitude,
    process_frequency,
)
from .settings import fluxparity_settings as settings
from .shortcuts import axis_values, format_float, parallel_map
from .util import angular_to_hz, hz_to_angular

logger = logging.getLogger(__name__)

VALUE_PE = 'p_e'
VALUE_INTENSITY = 'intensity'
BOUNDED_VALUES = (VALUE_PE, VALUE_INTENSITY)

THETA_LABEL = 'theta_pi'
PHI_LABEL = 'phi_rad'
FREQUENCY_LABEL = 'frequency_hz'

TRANSVERSAL = 'transversal'
LONGITUDINAL = 'longitudinal'
DEGENERACY = 'degeneracy'
DETUNED = 'detuned'
ALLOWED = 'allowed'
FORBIDDEN = 'forbidden'

DETUNED_THETA = 0.4 * math.pi
FORBIDDEN_THRESHOLD = 1e-12
SPOT_CHECK_RATIO = 0.05
DISPERSIVE_WARNING = 0.1

SIDEBAND_KINDS = (RED_SIDEBAND, BLUE_SIDEBAND, BLUE_TWO_PHOTON)
THERMAL_POPULATION = 'population'
THERMAL_AMPLITUDE = 'amplitude'

QUBIT_STATES = ('g', 'e')

PROCESS_LABELS = {
    ONE_PHOTON: 'one-photon',
    TWO_PHOTON: 'two-photon',
    RED_SIDEBAND: 'red sideband',
    BLUE_SIDEBAND: 'blue sideband',
    BLUE_TWO_PHOTON: 'two-photon blue sideband',
}

# (initial (qubit, n), final (qubit, n), drive photons); n is None for qubit-only processes
_TRANSITIONS = {
    ONE_PHOTON: ((GROUND, None), (EXCITED, None), 1),
    TWO_PHOTON: ((GROUND, None), (EXCITED, None), 2),
    RED_SIDEBAND: ((GROUND, 1), (EXCITED, 0), 1),
    BLUE_SIDEBAND: ((GROUND, 0), (EXCITED, 1), 1),
    BLUE_TWO_PHOTON: ((GROUND, 0), (EXCITED, 1), 2),
}


@dataclass(frozen=True)
class SystemParams:
    qubit: QubitParams
    resonator: ResonatorParams
    coupling: CouplingParams
    decoherence: DecoherenceParams

    @classmethod
    def from_settings(cls, n_max: int = None) -> 'SystemParams':
        """
        Sample parameters from the DJANGO_FLUXPARITY defaults, converted to
        angular units.
        """
        resonator = ResonatorParams(
            omega_r=hz_to_angular(settings.RESONATOR_FREQUENCY_HZ),
            kappa_x=hz_to_angular(settings.KAPPA_X_HZ),
            kappa_i=hz_to_angular(settings.KAPPA_I_HZ),
            n_max=settings.N_MAX if n_max is None else n_max,
        )
        return cls(
            qubit=QubitParams(hz_to_angular(settings.QUBIT_GAP_HZ), hz_to_angular(settings.QUBIT_BIAS_HZ)),
            resonator=resonator,
            coupling=CouplingParams(hz_to_angular(settings.COUPLING_T_HZ), hz_to_angular(settings.COUPLING_L_HZ)),
            decoherence=DecoherenceParams.from_times(settings.T1_S, settings.T2_S, kappa=resonator.kappa_total),
        )

    def as_dict(self) -> dict:
        return asdict(self)


def default_drive(params: SystemParams) -> DriveSpec:
    return DriveSpec(
        omega=params.qubit.omega_q,
        omega_max=hz_to_angular(settings.DRIVE_AMPLITUDE_HZ),
        imbalance_db=settings.IMBALANCE_DB,
        temperature=settings.EFFECTIVE_TEMPERATURE_K,
        leakage_db=settings.LEAKAGE_DB,
    )


# -----------------------------------------------------------------------------
# Sweep grids

@dataclass(frozen=True)
class SweepAxis:
    label: str
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError('Axis %r has no values' % self.label)
        steps = np.diff(values)
        if len(steps) and not (np.all(steps > 0.0) or np.all(steps < 0.0)):
            raise ValueError('Axis %r is not strictly monotone' % self.label)
        object.__setattr__(self, 'values', values)

    @classmethod
    def linspace(cls, label: str, start: float, stop: float, points: int) -> 'SweepAxis':
        return cls(label, axis_values(start, stop, points))

    def __len__(self) -> int:
        return len(self.values)

    def as_dict(self) -> dict:
        return {'label': self.label, 'values': list(self.values)}


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """
    values[i, j] belongs to (x_axis.values[i], y_axis.values[j]).
    """
    x_axis: SweepAxis
    y_axis: SweepAxis
    values: np.ndarray
    value_label: str = VALUE_PE
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        expected = (len(self.x_axis), len(self.y_axis))
        if values.shape != expected:
            raise ValueError('Grid values have shape %r, expected %r' % (values.shape, expected))
        if not np.all(np.isfinite(values)):
            raise InvariantViolation('Grid holds non-finite values')
        if self.value_label in BOUNDED_VALUES:
            if values.min() < -1e-9 or values.max() > 1.0 + 1e-9:
                raise InvariantViolation(
                    '%s values leave [0, 1]: [%.3g, %.3g]' % (self.value_label, values.min(), values.max())
                )
            values = np.clip(values, 0.0, 1.0)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    def column(self, index: int) -> np.ndarray:
        """
        All y values at x_axis.values[index].
        """
        return self.values[index, :]

    def to_csv(self) -> str:
        lines = ['%s,%s,%s' % (self.x_axis.label, self.y_axis.label, self.value_label)]
        for i, x in enumerate(self.x_axis.values):
            for j, y in enumerate(self.y_axis.values):
                lines.append(','.join(format_float(v) for v in (x, y, self.values[i, j])))
        return '\n'.join(lines) + '\n'

    def as_dict(self) -> dict:
        return {
            'x_axis': self.x_axis.as_dict(),
            'y_axis': self.y_axis.as_dict(),
            'value_label': self.value_label,
            'values': self.values.tolist(),
            'metadata': self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + '\n'


# -----------------------------------------------------------------------------
# Selection rules

@dataclass(frozen=True)
class SelectionRule:
    process: str
    drive: str
    drive_parity: str
    qubit_point: str
    verdict: str
    amplitude: float

    @property
    def label(self) -> str:
        return '%s / %s / %s' % (PROCESS_LABELS[self.process], self.drive, self.verdict)


@dataclass(frozen=True)
class SelectionRuleTable:
    rows: Tuple[SelectionRule, ...]

    def lookup(self, process: str, drive: str, qubit_point: str = DEGENERACY) -> SelectionRule:
        for row in self.rows:
            if (row.process, row.drive, row.qubit_point) == (process, drive, qubit_point):
                return row
        raise KeyError((process, drive, qubit_point))

    def as_dicts(self) -> List[dict]:
        return [asdict(row) for row in self.rows]

    def to_json(self) -> str:
        return json.dumps({'rows': self.as_dicts()}, indent=2, sort_keys=True) + '\n'

    def to_text(self) -> str:
        lines = []
        for row in self.rows:
            lines.append('%-50s parity=%-4s point=%-10s |A|=%.6e rad/s' % (
                row.label, row.drive_parity, row.qubit_point, abs(row.amplitude)))
        return '\n'.join(lines) + '\n'


def _transition_parity(process: str, operator, parity, n_max: int) -> Tuple[str, int]:
    """
    :return: (drive parity class, parity of ⟨f|Vⁿ|i⟩ or 0 without a rule)
    """
    (q_i, n_i), (q_f, n_f), photons = _TRANSITIONS[process]
    classification = parity_classify(operator, parity)
    if classification == PARITY_NONE:
        return classification, 0

    if n_i is None:
        space = HilbertSpace.qubit()
        initial, final = basis_state(space, q_i), basis_state(space, q_f)
    else:
        space = HilbertSpace.composite(n_max)
        initial, final = basis_state(space, q_i, n_i), basis_state(space, q_f, n_f)

    total = state_parity(parity, final) * parity_sign(classification) ** photons * state_parity(parity, initial)
    return classification, int(round(total))


def selection_rule_table(n_max: int = None, params: SystemParams = None, omega_max: float = None,
                         include_detuned: bool = False) -> SelectionRuleTable:
    """
    Allowed/forbidden verdicts for every process under a purely transversal
    and a purely longitudinal drive, derived from the parity of the drive
    operator and of the initial and final states. Each verdict is checked
    against the analytic amplitude at the same operating point.

    Away from degeneracy the drive has no definite parity, so the optional
    detuned rows are all allowed.
    """
    params = params or SystemParams.from_settings(n_max=n_max)
    n_max = params.resonator.n_max if n_max is None else n_max
    if n_max != params.resonator.n_max:
        params = replace(params, resonator=replace(params.resonator, n_max=n_max))
    omega_max = hz_to_angular(settings.DRIVE_AMPLITUDE_HZ) if omega_max is None else omega_max

    parity_q, _, parity_qr = parity_ops(n_max)
    gap = params.qubit.gap
    points = [(DEGENERACY, QubitParams(gap, 0.0))]
    if include_detuned:
        points.append((DETUNED, QubitParams.from_angle(DETUNED_THETA, gap=gap)))
    drives = (
        (TRANSVERSAL, DriveAmplitudes(0.0, omega_max)),
        (LONGITUDINAL, DriveAmplitudes(omega_max, 0.0)),
    )

    rows = []
    for point, q in points:
        for drive, amplitudes in drives:
            qubit_drive = drive_operator(q, amplitudes)
            for process in PROCESSES:
                if _TRANSITIONS[process][0][1] is None:
                    operator, parity = qubit_drive, parity_q
                else:
                    operator, parity = embed_qubit(qubit_drive, n_max), parity_qr
                classification, total = _transition_parity(process, operator, parity, n_max)
                verdict = FORBIDDEN if total == -1 else ALLOWED

                amplitude = process_amplitude(process, q, amplitudes, params.resonator, params.coupling).value
                vanishes = abs(amplitude) < FORBIDDEN_THRESHOLD * omega_max
                if vanishes != (verdict == FORBIDDEN):
                    raise InvariantViolation(
                        'Parity verdict %s for %s (%s drive, %s) disagrees with amplitude %.3e'
                        % (verdict, process, drive, point, amplitude),
                        amplitude=amplitude,
                    )
                rows.append(SelectionRule(process, drive, classification, point, verdict, amplitude))

    logger.debug('Selection-rule table with %d rows (n_max=%d)', len(rows), n_max)
    return SelectionRuleTable(tuple(rows))


# -----------------------------------------------------------------------------
# Spectrum maps

def linewidth(theta: float, dec: DecoherenceParams, prefactor: float = None) -> float:
    """
    Qubit linewidth along the hyperbola, prefactor·(γ2 + γ_φ|θ − π/2|).
    """
    prefactor = settings.LINEWIDTH_PREFACTOR if prefactor is None else prefactor
    return prefactor * (dec.gamma2 + dec.gamma_phi * abs(theta - math.pi / 2.0))


def _lorentzian(omega, center, width):
    return width ** 2 / ((omega - center) ** 2 + width ** 2)


def _spectrum_column(job) -> np.ndarray:
    kind, params, amplitudes, theta_pi, omegas, prefactor = job
    theta = theta_pi * math.pi
    q = QubitParams.from_angle(theta, gap=params.qubit.gap)
    amplitude = process_amplitude(kind, q, amplitudes, params.resonator, params.coupling).value
    center = process_frequency(kind, q.omega_q, params.resonator.omega_r)
    width = linewidth(theta, params.decoherence, prefactor)
    return amplitude ** 2 * _lorentzian(np.asarray(omegas), center, width)


def _scaled_amplitudes(kind: str, amplitudes: DriveAmplitudes, multiplier: float = None) -> DriveAmplitudes:
    if multiplier is None:
        multiplier = settings.PROCESS_DRIVE_MULTIPLIERS.get(kind, 1.0)
    return DriveAmplitudes(amplitudes[0] * multiplier, amplitudes[1] * multiplier)


def _raw_map(kind: str, params: SystemParams, amplitudes: DriveAmplitudes, theta_axis: SweepAxis,
             frequency_axis: SweepAxis, prefactor: float, multiplier: float, workers: int) -> np.ndarray:
    if kind not in PROCESSES:
        raise ValueError('Unknown process %r' % kind)
    for theta_pi in theta_axis.values:
        if not 0.0 < theta_pi < 1.0:
            raise ValueError('Bloch angles must lie in (0, 1)·π, got %r' % theta_pi)

    scaled = _scaled_amplitudes(kind, amplitudes, multiplier)
    omegas = tuple(hz_to_angular(f) for f in frequency_axis.values)
    jobs = [(kind, params, scaled, theta_pi, omegas, prefactor) for theta_pi in theta_axis.values]
    return np.array(parallel_map(_spectrum_column, jobs, workers))


def _normalized(values: np.ndarray) -> np.ndarray:
    peak = values.max()
    return values / peak if peak > 0.0 else values


def _map_metadata(kinds, params, amplitudes, prefactor) -> dict:
    prefactor = settings.LINEWIDTH_PREFACTOR if prefactor is None else prefactor
    return {
        'processes': list(kinds),
        'params': params.as_dict(),
        'amplitudes': {'longitudinal': amplitudes[0], 'transversal': amplitudes[1]},
        'multipliers': {kind: settings.PROCESS_DRIVE_MULTIPLIERS.get(kind, 1.0) for kind in kinds},
        'linewidth_prefactor': prefactor,
    }


def spectrum_map(kind: str, params: SystemParams, amplitudes: DriveAmplitudes, theta_axis: SweepAxis,
                 frequency_axis: SweepAxis, prefactor: float = None, multiplier: float = None,
                 workers: int = None) -> SweepGrid:
    """
    Intensity map of one process over (θ/π, drive frequency in Hz): the
    squared analytic amplitude on a Lorentzian of width linewidth(θ) around
    the process frequency, with the qubit following the hyperbola at fixed
    gap. Normalized to a unit peak.

    :param multiplier: drive amplitude scale for this process, defaults to
        the PROCESS_DRIVE_MULTIPLIERS setting
    """
    values = _raw_map(kind, params, amplitudes, theta_axis, frequency_axis, prefactor, multiplier, workers)
    logger.info('Spectrum map %s on %d×%d grid', kind, len(theta_axis), len(frequency_axis))
    metadata = _map_metadata((kind,), params, amplitudes, prefactor)
    if multiplier is not None:
        metadata['multipliers'] = {kind: multiplier}
    return SweepGrid(theta_axis, frequency_axis, _normalized(values), VALUE_INTENSITY, metadata)


def sideband_map(params: SystemParams, amplitudes: DriveAmplitudes, theta_axis: SweepAxis,
                 frequency_axis: SweepAxis, kinds: Sequence[str] = SIDEBAND_KINDS,
                 prefactor: float = None, workers: int = None) -> SweepGrid:
    """
    Overlay of several processes on one grid. Each process is driven with
    its own multiplier; the sum is normalized as a whole so relative
    strengths survive.
    """
    values = sum(
        _raw_map(kind, params, amplitudes, theta_axis, frequency_axis, prefactor, None, workers)
        for kind in kinds
    )
    logger.info('Sideband map (%s) on %d×%d grid', ', '.join(kinds), len(theta_axis), len(frequency_axis))
    return SweepGrid(theta_axis, frequency_axis, _normalized(values), VALUE_INTENSITY,
                     _map_metadata(kinds, params, amplitudes, prefactor))


class SpotCheck(NamedTuple):
    theta_pi: float
    analytic_ratio: float
    oracle_ratio: float

    @property
    def agrees(self) -> bool:
        return (self.analytic_ratio >= SPOT_CHECK_RATIO) == (self.oracle_ratio >= SPOT_CHECK_RATIO)


def _spot_point(job) -> Tuple[float, float]:
    kind, params, amplitudes, theta_pi, steps_per_period = job
    q = QubitParams.from_angle(theta_pi * math.pi, gap=params.qubit.gap)
    amplitude = process_amplitude(kind, q, amplitudes).value
    drive = DriveSpec(omega=process_frequency(kind, q.omega_q, params.resonator.omega_r))
    p_e = qubit_steady_state(q, drive, params.decoherence, amplitudes=amplitudes,
                             steps_per_period=steps_per_period)
    return amplitude ** 2, p_e


def spectrum_oracle_check(kind: str, params: SystemParams, amplitudes: DriveAmplitudes,
                          thetas_pi: Sequence[float], multiplier: float = None,
                          steps_per_period: int = None, workers: int = None) -> List[SpotCheck]:
    """
    Compare the analytic map with brute-force steady states on the
    resonance line at the given Bloch angles. Each side is expressed as a
    ratio to its own maximum over the sampled points.
    """
    if kind not in (ONE_PHOTON, TWO_PHOTON):
        raise ValueError('Oracle spot checks cover qubit-only processes, got %r' % kind)

    scaled = _scaled_amplitudes(kind, amplitudes, multiplier)
    jobs = [(kind, params, scaled, float(theta_pi), steps_per_period) for theta_pi in thetas_pi]
    samples = np.array(parallel_map(_spot_point, jobs, workers))
    analytic = _normalized(samples[:, 0])
    oracle = _normalized(samples[:, 1])

    checks = [SpotCheck(job[3], float(a), float(o)) for job, a, o in zip(jobs, analytic, oracle)]
    for check in checks:
        if not check.agrees:
            logger.warning('Oracle and analytic map disagree at θ=%.4gπ (%.3g vs %.3g)',
                           check.theta_pi, check.analytic_ratio, check.oracle_ratio)
    return checks


# -----------------------------------------------------------------------------
# Phase sweeps

def _phase_point(job) -> float:
    q, drive, dec, thermal_model, use_oracle, steps_per_period = job
    omega_q = q.omega_q

    if thermal_model == THERMAL_POPULATION:
        amplitudes = drive_amplitudes(replace(drive, temperature=0.0), omega_q)
        dec = dec.with_thermal_population(stray_population(omega_q, drive.temperature))
    else:
        amplitudes = drive_amplitudes(drive, omega_q)

    if use_oracle:
        return qubit_steady_state(q, drive, dec, amplitudes=amplitudes, steps_per_period=steps_per_period)
    rabi = one_photon_amplitude(amplitudes.longitudinal, amplitudes.transversal, q.theta, drive.omega).rabi_frequency
    return analytic_steady_state_pe(rabi, drive.omega - omega_q, dec)


def phase_sweep(params: SystemParams, phi_axis: SweepAxis, drive: DriveSpec = None,
                use_oracle: bool = False, thermal_model: str = THERMAL_POPULATION,
                steps_per_period: int = None, workers: int = None) -> SweepGrid:
    """
    Resonant steady-state p_e at the degeneracy point as a function of the
    relative antenna phase φ.

    With thermal_model="population" the drive amplitudes are taken at zero
    temperature and the stray excitation enters as a thermal population of
    the qubit; "amplitude" adds the thermal floor to the transversal drive
    instead.
    """
    if thermal_model not in (THERMAL_POPULATION, THERMAL_AMPLITUDE):
        raise ValueError('Unknown thermal model %r' % thermal_model)

    q = QubitParams(params.qubit.gap, 0.0)
    drive = drive or default_drive(params)
    drive = replace(drive, omega=q.omega_q)

    jobs = [(q, replace(drive, phi=phi), params.decoherence, thermal_model, use_oracle, steps_per_period)
            for phi in phi_axis.values]
    values = np.array(parallel_map(_phase_point, jobs, workers)).reshape(len(phi_axis), 1)

    logger.info('Phase sweep over %d points (%s, thermal model %s)', len(phi_axis),
                'oracle' if use_oracle else 'analytic', thermal_model)
    metadata = {
        'params': params.as_dict(),
        'drive': asdict(drive),
        'engine': 'oracle' if use_oracle else 'analytic',
        'thermal_model': thermal_model,
    }
    frequency_axis = SweepAxis(FREQUENCY_LABEL, (angular_to_hz(q.omega_q),))
    return SweepGrid(phi_axis, frequency_axis, values, VALUE_PE, metadata)


def _sin_squared(phi, scale):
    return scale * np.sin(phi / 2.0) ** 2


def fit_sin_squared(phi: Sequence[float], p_e: Sequence[float]) -> Tuple[float, float]:
    """
    Least-squares fit of p_e = c·sin²(φ/2).

    :return: (c, largest residual as a fraction of max p_e)
    """
    phi = np.asarray(phi, dtype=float)
    p_e = np.asarray(p_e, dtype=float)
    (scale,), _ = curve_fit(_sin_squared, phi, p_e, p0=(max(float(p_e.max()), 1e-12),))
    residual = np.max(np.abs(_sin_squared(phi, scale) - p_e))
    return float(scale), float(residual / p_e.max())


# -----------------------------------------------------------------------------
# Calibration

class LorentzianFit(NamedTuple):
    center: float
    width: float
    peak: float


def power_broadening(photons: float, dec: DecoherenceParams, g: float) -> float:
    """
    Power-broadened qubit linewidth √(γ2² + n̄(2g)²γ2/γ1).
    """
    if not dec.gamma1 > 0.0:
        raise ValueError('Power broadening requires γ1 > 0')
    if photons < 0.0:
        raise ValueError('Photon number must be non-negative, got %r' % photons)
    return math.sqrt(dec.gamma2 ** 2 + photons * (2.0 * g) ** 2 * dec.gamma2 / dec.gamma1)


def photons_from_linewidth(width: float, dec: DecoherenceParams, g: float) -> float:
    if not dec.gamma1 > 0.0:
        raise ValueError('Power broadening requires γ1 > 0')
    if not g > 0.0:
        raise ValueError('Coupling must be positive, got %r' % g)
    return (width ** 2 - dec.gamma2 ** 2) * dec.gamma1 / ((2.0 * g) ** 2 * dec.gamma2)


def ac_stark_shift(g_t: float, delta: float, photons: float) -> float:
    """
    Qubit frequency shift 2n̄g_t²/δ from a resonator population n̄.
    """
    if delta == 0.0:
        raise ValueError('Stark shift is undefined at zero detuning')
    return 2.0 * photons * g_t ** 2 / delta


def photons_from_stark_shift(g_t: float, delta: float, shift: float) -> float:
    if delta == 0.0:
        raise ValueError('Stark shift is undefined at zero detuning')
    if g_t == 0.0:
        raise ValueError('No Stark shift without coupling')
    return shift * delta / (2.0 * g_t ** 2)


def ac_stark_and_photons(g_t: float, delta: float, photons: float = None, shift: float = None) -> float:
    """
    Give exactly one of `photons` or `shift`; the other is returned.
    """
    if (photons is None) == (shift is None):
        raise ValueError('Exactly one of photons or shift must be given')
    if photons is not None:
        return ac_stark_shift(g_t, delta, photons)
    return photons_from_stark_shift(g_t, delta, shift)


def critical_photon_number(g_t: float, delta: float) -> float:
    if not g_t > 0.0:
        raise ValueError('Coupling must be positive, got %r' % g_t)
    return delta ** 2 / (2.0 * g_t) ** 2


def dispersive_ratio(g_t: float, delta: float) -> float:
    if delta == 0.0:
        raise ValueError('Dispersive ratio is undefined at zero detuning')
    return (g_t / delta) ** 2


def loaded_quality_factor(r: ResonatorParams) -> float:
    return r.omega_r / r.kappa_total


def resonator_transmission(r: ResonatorParams, qubit_state: str, g_t: float, delta: float,
                           omegas: Sequence[float]) -> np.ndarray:
    """
    Dispersively pulled resonator Lorentzian, centered at ω_r + g_t²/δ for
    the excited qubit and ω_r − g_t²/δ for the ground state, with full width
    κ_x + κ_i and peak κ_x/(κ_x + κ_i).
    """
    if qubit_state not in QUBIT_STATES:
        raise ValueError('Qubit state must be one of %s, got %r' % (QUBIT_STATES, qubit_state))
    if delta == 0.0:
        raise ValueError('Dispersive pull is undefined at zero detuning')
    if abs(g_t / delta) > DISPERSIVE_WARNING:
        logger.warning('g_t/δ = %.3g is outside the dispersive regime', g_t / delta)

    pull = g_t ** 2 / delta
    center = r.omega_r + (pull if qubit_state == 'e' else -pull)
    half_width = r.kappa_total / 2.0
    peak = r.kappa_x / r.kappa_total
    return peak * _lorentzian(np.asarray(omegas, dtype=float), center, half_width)


def _unit_lorentzian(x, center, half_width, peak):
    return peak * half_width ** 2 / ((x - center) ** 2 + half_width ** 2)


def fit_lorentzian(omegas: Sequence[float], values: Sequence[float]) -> LorentzianFit:
    """
    Fit a Lorentzian peak; `width` is the full width at half maximum.
    """
    omegas = np.asarray(omegas, dtype=float)
    values = np.asarray(values, dtype=float)
    peak_index = int(np.argmax(values))
    center_seed = omegas[peak_index]
    above = omegas[values >= values[peak_index] / 2.0]
    spacing = abs(omegas[1] - omegas[0])
    width_seed = max(above.max() - above.min(), spacing)

    # fit in units of the seed width around the seed center
    scaled = (omegas - center_seed) / width_seed
    (center, half_width, peak), _ = curve_fit(
        _unit_lorentzian, scaled, values, p0=(0.0, 0.5, values[peak_index]), maxfev=10000,
    )
    return LorentzianFit(
        center=float(center_seed + center * width_seed),
        width=float(2.0 * abs(half_width) * width_seed),
        peak=float(peak),
    )


def stray_excitation(omega_q: float, temperature: float) -> float:
    return stray_population(omega_q, temperature)


def readout_photons(power_mw: float) -> float:
    return settings.READOUT_PHOTONS_PER_MW * power_mw


def readout_power(photons: float) -> float:
    return photons / settings.READOUT_PHOTONS_PER_MW


def drive_photons(power_mw: float) -> float:
    return settings.DRIVE_PHOTONS_PER_MW * power_mw


def drive_power(photons: float) -> float:
    return photons / settings.DRIVE_PHOTONS_PER_MW


def calibration_summary(params: SystemParams, photons: float = None, drive_power_mw: float = 1.0) -> Dict[str, float]:
    """
    Calibration quantities at the operating point, in lab units (Hz).
    """
    photons = settings.READOUT_PHOTONS if photons is None else photons
    q, r, c, dec = params.qubit, params.resonator, params.coupling, params.decoherence
    delta = q.omega_q - r.omega_r
    n_drive = drive_photons(drive_power_mw)
    return {
        'qubit_frequency_hz': angular_to_hz(q.omega_q),
        'detuning_hz': angular_to_hz(delta),
        'stray_excitation': stray_excitation(q.omega_q, settings.EFFECTIVE_TEMPERATURE_K),
        'critical_photon_number': critical_photon_number(c.g_t, delta),
        'dispersive_ratio': dispersive_ratio(c.g_t, delta),
        'readout_photons': photons,
        'readout_power_mw': readout_power(photons),
        'stark_shift_hz': angular_to_hz(ac_stark_shift(c.g_t, delta, photons)),
        'drive_power_mw': drive_power_mw,
        'drive_photons': n_drive,
        'power_broadened_linewidth_hz': angular_to_hz(power_broadening(n_drive, dec, c.g_t)),
        'loaded_quality_factor': loaded_quality_factor(r),
        'kappa_total_hz': angular_to_hz(r.kappa_total),
    }
