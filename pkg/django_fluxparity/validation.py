"""
Acceptance suite run by `manage.py fluxparity validate`.

Every check returns (passed, detail). Propagation-based checks work in
desk-scale units where the qubit frequency is 2π (one drive period per
time unit), so brute-force runs stay short.
"""
import logging
import math
import time
from typing import Callable, List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .analysis import (
    ALLOWED,
    FORBIDDEN,
    FREQUENCY_LABEL,
    LONGITUDINAL,
    PHI_LABEL,
    THETA_LABEL,
    TRANSVERSAL,
    SweepAxis,
    SystemParams,
    critical_photon_number,
    default_drive,
    fit_lorentzian,
    fit_sin_squared,
    phase_sweep,
    power_broadening,
    resonator_transmission,
    selection_rule_table,
    spectrum_map,
    stray_excitation,
)
from .dynamics import (
    DecoherenceParams,
    PropagationConfig,
    extract_rabi,
    ground_state,
    propagate,
    qubit_steady_state,
    steady_state_pe,
)
from .model import DriveAmplitudes, DriveSpec, QubitParams, driven_qubit_family
from .rwa import (
    BLUE_SIDEBAND,
    BLUE_TWO_PHOTON,
    ONE_PHOTON,
    RED_SIDEBAND,
    TWO_PHOTON,
    bessel_j,
    one_photon_amplitude,
    two_photon_amplitude,
)
from .util import TWO_PI, hz_to_angular

logger = logging.getLogger(__name__)

DESK_OMEGA_Q = TWO_PI
DESK_DECOHERENCE = DecoherenceParams(gamma1=0.1, gamma2=0.1)
THETA_GRID = tuple(np.linspace(0.1 * math.pi, 0.9 * math.pi, 21))
TRANSPARENCY_RATIOS = (0.5, 1.0, 5.0, 30.0)
ROOT_EXCLUSION = 0.02 * math.pi
TWO_PHOTON_THETAS = tuple(f * math.pi for f in (0.35, 0.4, 0.45, 0.55, 0.6))

EXPECTED_VERDICTS = {
    (ONE_PHOTON, TRANSVERSAL): ALLOWED,
    (ONE_PHOTON, LONGITUDINAL): FORBIDDEN,
    (TWO_PHOTON, TRANSVERSAL): FORBIDDEN,
    (TWO_PHOTON, LONGITUDINAL): FORBIDDEN,
    (RED_SIDEBAND, TRANSVERSAL): FORBIDDEN,
    (RED_SIDEBAND, LONGITUDINAL): ALLOWED,
    (BLUE_SIDEBAND, TRANSVERSAL): FORBIDDEN,
    (BLUE_SIDEBAND, LONGITUDINAL): ALLOWED,
    (BLUE_TWO_PHOTON, TRANSVERSAL): ALLOWED,
    (BLUE_TWO_PHOTON, LONGITUDINAL): ALLOWED,
}


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str

    def as_dict(self) -> dict:
        return self._asdict()


def desk_qubit(theta: float) -> QubitParams:
    return QubitParams.from_angle(theta, omega_q=DESK_OMEGA_Q)


def coherent_run(q: QubitParams, omega: float, amplitudes: DriveAmplitudes, duration: float):
    family = driven_qubit_family(q, DriveSpec(omega=omega), amplitudes)
    cfg = PropagationConfig.for_family(family, duration)
    return propagate(family, DecoherenceParams.coherent(), ground_state(family.space), cfg)


def measured_rabi(q: QubitParams, omega: float, amplitudes: DriveAmplitudes, expected: float) -> float:
    """
    On-resonance Rabi rate from 1.5 expected periods of coherent evolution.
    """
    result = coherent_run(q, omega, amplitudes, 1.5 * TWO_PI / expected)
    return extract_rabi(result.times, result.p_e).resonant_frequency


def check_selection_rules() -> Tuple[bool, str]:
    table = selection_rule_table()
    mismatches = [
        '%s/%s' % key for key, verdict in EXPECTED_VERDICTS.items()
        if table.lookup(*key).verdict != verdict
    ]
    if mismatches:
        return False, 'unexpected verdicts: %s' % ', '.join(mismatches)
    return True, '%d degeneracy rows match' % len(EXPECTED_VERDICTS)


def check_transparency() -> Tuple[bool, str]:
    failures = []
    for ratio in TRANSPARENCY_RATIOS:
        transversal = 0.01 * DESK_OMEGA_Q / max(1.0, ratio)
        amplitudes = DriveAmplitudes(ratio * transversal, transversal)

        def amplitude(theta):
            return one_photon_amplitude(amplitudes[0], amplitudes[1], theta, DESK_OMEGA_Q).value

        theta_star = math.atan(ratio)
        roots = []
        for target in (theta_star, math.pi - theta_star):
            root = brentq(amplitude, target - 0.02, target + 0.02, xtol=1e-15)
            if abs(root - target) > 1e-10:
                failures.append('r=%g root %.12f vs %.12f' % (ratio, root, target))
            roots.append(root)

        def steady(theta):
            q = desk_qubit(theta)
            return qubit_steady_state(q, DriveSpec(omega=q.omega_q), DESK_DECOHERENCE, amplitudes=amplitudes)

        peak = max(steady(theta) for theta in THETA_GRID)
        for root in roots:
            level = steady(root)
            if level >= 0.05 * peak:
                failures.append('r=%g p_e(%.4f)=%.3g against peak %.3g' % (ratio, root, level, peak))

    if failures:
        return False, '; '.join(failures)
    return True, 'roots and oracle dips at atan(r), π − atan(r) for r in %s' % (TRANSPARENCY_RATIOS,)


def check_rwa_against_oracle() -> Tuple[bool, str]:
    drive = DESK_OMEGA_Q / 100.0
    amplitudes = DriveAmplitudes(drive, drive)
    roots = (math.pi / 4.0, 3.0 * math.pi / 4.0)

    worst = 0.0
    for theta in THETA_GRID:
        if any(abs(theta - root) < ROOT_EXCLUSION for root in roots):
            continue
        expected = one_photon_amplitude(drive, drive, theta, DESK_OMEGA_Q).rabi_frequency
        measured = measured_rabi(desk_qubit(theta), DESK_OMEGA_Q, amplitudes, expected)
        worst = max(worst, abs(measured / expected - 1.0))

    return worst < 0.05, 'largest relative Rabi deviation %.3g' % worst


def check_phase_sweep() -> Tuple[bool, str]:
    params = SystemParams.from_settings()
    axis = SweepAxis.linspace(PHI_LABEL, 0.0, TWO_PI, 64)
    warm = phase_sweep(params, axis)
    floor_ok = 0.03 <= warm.min_value <= 0.06
    peak_ok = 0.45 <= warm.max_value <= 0.5

    weak = default_drive(params)
    weak = DriveSpec(omega=weak.omega, omega_max=hz_to_angular(20e3))
    cold = phase_sweep(params, axis, drive=weak)
    _, residual = fit_sin_squared(axis.values, cold.values[:, 0])
    detail = 'T_e>0: min %.4g max %.4g; T_e=0 weak drive sin² residual %.3g' % (
        warm.min_value, warm.max_value, residual)
    return floor_ok and peak_ok and residual < 0.02, detail


def check_two_photon_parity() -> Tuple[bool, str]:
    drive = 0.05 * DESK_OMEGA_Q
    failures = []

    # pure transversal drive at half the qubit frequency, degeneracy point
    one_photon_rabi = drive / 2.0
    degenerate = QubitParams(DESK_OMEGA_Q, 0.0)
    result = coherent_run(degenerate, DESK_OMEGA_Q / 2.0, DriveAmplitudes(0.0, drive),
                          5.0 * TWO_PI / one_photon_rabi)
    if result.p_e.max() >= 0.02:
        failures.append('degeneracy p_e reached %.3g' % result.p_e.max())

    mixed = DriveAmplitudes(drive, drive)
    q = desk_qubit(0.4 * math.pi)
    expected = two_photon_amplitude(drive, drive, q.theta, DESK_OMEGA_Q / 2.0).rabi_frequency
    result = coherent_run(q, DESK_OMEGA_Q / 2.0, mixed, TWO_PI / expected)
    if result.p_e.max() <= 0.1:
        failures.append('mixed drive at 0.4π only reached p_e %.3g' % result.p_e.max())

    for theta in TWO_PHOTON_THETAS:
        expected = two_photon_amplitude(drive, drive, theta, DESK_OMEGA_Q / 2.0).rabi_frequency
        measured = measured_rabi(desk_qubit(theta), DESK_OMEGA_Q / 2.0, mixed, expected)
        if abs(measured / expected - 1.0) > 0.1:
            failures.append('θ=%.3gπ two-photon rate %.4g vs %.4g' % (theta / math.pi, measured, expected))

    if failures:
        return False, '; '.join(failures)
    return True, 'two-photon excitation blocked at degeneracy and matched at %d angles' % len(TWO_PHOTON_THETAS)


def check_calibration() -> Tuple[bool, str]:
    failures = []
    dec = DecoherenceParams(gamma1=hz_to_angular(385e3), gamma2=hz_to_angular(9.7e6))
    g = hz_to_angular(40e6)
    if power_broadening(0.0, dec, g) != dec.gamma2:
        failures.append('zero-photon linewidth differs from γ2')
    broadened = power_broadening(0.16, dec, g) / TWO_PI
    if abs(broadened / 161e6 - 1.0) > 0.005:
        failures.append('power broadening %.4g Hz' % broadened)

    stray = stray_excitation(hz_to_angular(8.2e9), 0.125)
    if abs(stray - 0.0429) > 1e-4:
        failures.append('stray excitation %.5g' % stray)

    n_crit = critical_photon_number(g, hz_to_angular(4.32e9))
    if not math.isclose(n_crit, 2916.0, rel_tol=1e-12):
        failures.append('critical photon number %.10g' % n_crit)

    params = SystemParams.from_settings()
    r = params.resonator
    omegas = np.linspace(r.omega_r - 10.0 * r.kappa_total, r.omega_r + 10.0 * r.kappa_total, 2001)
    curve = resonator_transmission(r, 'g', g, hz_to_angular(4.32e9), omegas)
    width = fit_lorentzian(omegas, curve).width / TWO_PI
    if abs(width / 2.5e6 - 1.0) > 0.01:
        failures.append('fitted resonator width %.4g Hz' % width)

    if failures:
        return False, '; '.join(failures)
    return True, 'γ_q/2π=%.4g MHz, p_str=%.5g, n_crit=%.6g, κ_tot/2π=%.4g MHz' % (
        broadened / 1e6, stray, n_crit, width / 1e6)


def _bessel_residual(x: float) -> float:
    first = abs(bessel_j(0, x) + bessel_j(2, x) - 2.0 / x * bessel_j(1, x))
    second = abs(bessel_j(1, x) + bessel_j(3, x) - 4.0 / x * bessel_j(2, x))
    return max(first, second)


def check_numerics() -> Tuple[bool, str]:
    failures = []
    residual = max(_bessel_residual(x) for x in np.linspace(0.1, 10.0, 100))
    if residual >= 1e-9:
        failures.append('Bessel recurrence residual %.3g' % residual)

    drive = 0.05 * DESK_OMEGA_Q
    q = desk_qubit(0.4 * math.pi)
    family = driven_qubit_family(q, DriveSpec(omega=q.omega_q), DriveAmplitudes(drive, drive))
    t_final = 15.0 / DESK_DECOHERENCE.gamma1
    levels, drift = [], 0.0
    for steps in (50, 100):
        cfg = PropagationConfig.for_family(family, t_final, DESK_DECOHERENCE, steps_per_period=steps)
        levels.append(steady_state_pe(family, DESK_DECOHERENCE, cfg))
        result = propagate(family, DESK_DECOHERENCE, ground_state(family.space), cfg)
        drift = max(drift, result.max_trace_drift)
    if drift >= 1e-8:
        failures.append('trace drift %.3g' % drift)
    if abs(levels[0] - levels[1]) >= 1e-4:
        failures.append('dt halving moved p_e by %.3g' % abs(levels[0] - levels[1]))

    params = SystemParams.from_settings()
    theta_axis = SweepAxis.linspace(THETA_LABEL, 0.2, 0.8, 5)
    frequency_axis = SweepAxis.linspace(FREQUENCY_LABEL, 8e9, 12e9, 7)
    amplitudes = DriveAmplitudes(hz_to_angular(5e6), hz_to_angular(5e6))
    outputs = set()
    for workers in (1, 1, 2):
        grid = spectrum_map(ONE_PHOTON, params, amplitudes, theta_axis, frequency_axis, workers=workers)
        outputs.add(grid.to_csv() + grid.to_json())
    if len(outputs) != 1:
        failures.append('reruns are not byte-identical')

    if failures:
        return False, '; '.join(failures)
    return True, 'Bessel residual %.2g, trace drift %.2g, dt-halving Δp_e %.2g' % (
        residual, drift, abs(levels[0] - levels[1]))


CHECKS: Sequence[Tuple[str, Callable[[], Tuple[bool, str]]]] = (
    ('selection_rules', check_selection_rules),
    ('transparency', check_transparency),
    ('rwa_vs_oracle', check_rwa_against_oracle),
    ('phase_sweep', check_phase_sweep),
    ('two_photon_parity', check_two_photon_parity),
    ('calibration', check_calibration),
    ('numerics', check_numerics),
)


def run_checks(names: Sequence[str] = None) -> List[CheckResult]:
    known = dict(CHECKS)
    names = list(names) if names else [name for name, _ in CHECKS]
    unknown = [name for name in names if name not in known]
    if unknown:
        raise ValueError('Unknown checks: %s' % ', '.join(unknown))

    results = []
    for name in names:
        started = time.perf_counter()
        passed, detail = known[name]()
        logger.info('%s %s in %.2fs: %s', name, 'passed' if passed else 'FAILED',
                    time.perf_counter() - started, detail)
        results.append(CheckResult(name, bool(passed), detail))
    return results
