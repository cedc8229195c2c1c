"""
Brute-force open-system propagation of the driven qubit (and resonator).

The density matrix follows the Lindblad equation

    dρ/dt = -i[H(t), ρ] + Σ_k (L_k ρ L_k† - ½{L_k†L_k, ρ})

integrated with fixed-step RK4. Families whose drive shares a single period
are stepped with cached one-step propagators of the vectorized generator
(row-major vec, vec(AρB) = (A ⊗ Bᵀ) vec ρ); everything else is stepped on
the density matrix directly.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional

import numpy as np
from scipy.optimize import curve_fit

from .exceptions import ConfigurationError, ConvergenceError, InvariantViolation
from .model import (
    CouplingParams,
    DriveAmplitudes,
    DriveSpec,
    HamiltonianFamily,
    QubitParams,
    ReadoutTone,
    ResonatorParams,
    build_h_system,
    driven_qubit_family,
    driven_system_family,
)
from .operators import (
    EXCITED,
    GROUND,
    HilbertSpace,
    basis_state,
    boson_ops,
    density_matrix,
    embed_qubit,
    embed_resonator,
    excited_projector,
    pauli,
)
from .rwa import dressed_index
from .settings import fluxparity_settings as settings
from .util import TWO_PI

logger = logging.getLogger(__name__)

RED = 'red'
BLUE = 'blue'

# Largest dim² for which per-phase step matrices are cached
CACHE_DIMENSION_LIMIT = 256
SETTLING_RELAXATION_TIMES = 15.0
MAX_RECORDS = 2000


@dataclass(frozen=True)
class DecoherenceParams:
    """
    Plain rates: γ1 = 1/T1, γ2 = 1/T2, γ_φ = γ2 − γ1/2.

    `thermal_population` splits γ1 into a downward rate γ1(1 − p) and an
    upward rate γ1·p, so the undriven qubit relaxes to p_e = p.
    """
    gamma1: float = 0.0
    gamma2: float = 0.0
    kappa: float = 0.0
    thermal_population: float = 0.0

    def __post_init__(self):
        if self.gamma1 < 0.0 or self.kappa < 0.0:
            raise ValueError('Decay rates must be non-negative')
        if self.gamma2 < self.gamma1 / 2.0 * (1.0 - 1e-12):
            raise ValueError(
                'γ2 must be at least γ1/2 (got γ1=%r, γ2=%r)' % (self.gamma1, self.gamma2)
            )
        if not 0.0 <= self.thermal_population < 0.5:
            raise ValueError('Thermal population must lie in [0, 0.5), got %r' % self.thermal_population)

    @property
    def gamma_phi(self) -> float:
        return max(self.gamma2 - self.gamma1 / 2.0, 0.0)

    @classmethod
    def from_times(cls, t1: float = None, t2: float = None, kappa: float = 0.0,
                   thermal_population: float = 0.0) -> 'DecoherenceParams':
        gamma1 = 1.0 / t1 if t1 else 0.0
        gamma2 = 1.0 / t2 if t2 else gamma1 / 2.0
        return cls(gamma1, gamma2, kappa, thermal_population)

    @classmethod
    def coherent(cls) -> 'DecoherenceParams':
        return cls()

    def with_thermal_population(self, population: float) -> 'DecoherenceParams':
        return replace(self, thermal_population=population)

    @property
    def max_rate(self) -> float:
        return max(self.gamma1, self.gamma2, self.kappa)


@dataclass(frozen=True)
class PropagationConfig:
    dt: float
    t_final: float
    record_stride: int = 1
    steady_window: float = 0.2

    def __post_init__(self):
        if not self.dt > 0.0 or not self.t_final > 0.0:
            raise ValueError('dt and t_final must be positive')
        if self.record_stride < 1:
            raise ValueError('record_stride must be at least 1')
        if not 0.0 < self.steady_window <= 0.5:
            raise ValueError('steady_window must lie in (0, 0.5], got %r' % self.steady_window)

    @property
    def n_steps(self) -> int:
        return max(1, int(math.ceil(self.t_final / self.dt - 1e-9)))

    @classmethod
    def for_family(cls, family: HamiltonianFamily, t_final: float, dec: DecoherenceParams = None,
                   steps_per_period: int = None, record_stride: int = None,
                   steady_window: float = None) -> 'PropagationConfig':
        """
        Largest admissible step for `family`. Single-period families get a
        step that divides the drive period, and by default record once per
        period (thinned to at most MAX_RECORDS samples).
        """
        steps_per_period = steps_per_period or settings.STEPS_PER_PERIOD
        steady_window = settings.STEADY_WINDOW if steady_window is None else steady_window
        dt = TWO_PI / fastest_frequency(family, dec) / steps_per_period

        period = family.period
        if period is not None:
            per_period = int(math.ceil(period / dt - 1e-9))
            dt = period / per_period
            n_periods = int(math.ceil(t_final / period - 1e-9))
            t_final = n_periods * period
            if record_stride is None:
                record_stride = per_period * max(1, n_periods // MAX_RECORDS)
        elif record_stride is None:
            n_steps = int(math.ceil(t_final / dt))
            record_stride = max(1, n_steps // MAX_RECORDS)

        return cls(dt=dt, t_final=t_final, record_stride=record_stride, steady_window=steady_window)


@dataclass
class TrajectoryResult:
    times: np.ndarray
    p_e: np.ndarray
    photons: Optional[np.ndarray]
    final_state: np.ndarray
    max_trace_drift: float = 0.0
    min_eigenvalue: float = 0.0
    dt: Optional[float] = None

    def window(self, start_fraction: float, stop_fraction: float = 1.0) -> np.ndarray:
        t_final = self.times[-1]
        mask = (self.times >= start_fraction * t_final) & (self.times <= stop_fraction * t_final)
        return self.p_e[mask]

    @property
    def mean_pe(self) -> float:
        return float(np.mean(self.p_e))


class RabiFit(NamedTuple):
    frequency: float
    amplitude: float

    @property
    def resonant_frequency(self) -> float:
        """
        Ω·√P, the Rabi frequency with any drive detuning removed.
        """
        return self.frequency * math.sqrt(max(self.amplitude, 0.0))


def fastest_frequency(family: HamiltonianFamily, dec: DecoherenceParams = None) -> float:
    fastest = max(family.spectral_scale(), family.max_frequency)
    if dec is not None:
        fastest = max(fastest, dec.max_rate)
    if not fastest > 0.0:
        raise ConfigurationError('The model has no dynamics to resolve', field='propagation')
    return fastest


def collapse_operators(dec: DecoherenceParams, space: HilbertSpace) -> List[np.ndarray]:
    """
    √(γ1(1−p))σ_−, √(γ1·p)σ_+, √(γ_φ/2)σ_z and, with a resonator factor, √κ·a.
    """
    n_max = space.factor_dims[1] - 1 if len(space.factor_dims) > 1 else None

    def qubit(kind):
        op = pauli(kind)
        return op.matrix if n_max is None else embed_qubit(op, n_max).matrix

    operators = []
    p = dec.thermal_population
    if dec.gamma1 * (1.0 - p) > 0.0:
        operators.append(math.sqrt(dec.gamma1 * (1.0 - p)) * qubit('minus'))
    if dec.gamma1 * p > 0.0:
        operators.append(math.sqrt(dec.gamma1 * p) * qubit('plus'))
    if dec.gamma_phi > 0.0:
        operators.append(math.sqrt(dec.gamma_phi / 2.0) * qubit('z'))
    if dec.kappa > 0.0 and n_max is not None:
        a, _, _ = boson_ops(n_max)
        operators.append(math.sqrt(dec.kappa) * embed_resonator(a).matrix)
    return operators


def hamiltonian_superoperator(h: np.ndarray) -> np.ndarray:
    identity = np.eye(h.shape[0])
    return -1j * (np.kron(h, identity) - np.kron(identity, h.T))


def dissipator_superoperator(operators: List[np.ndarray], dim: int) -> np.ndarray:
    identity = np.eye(dim)
    generator = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for op in operators:
        decay = op.conj().T @ op
        generator += np.kron(op, op.conj()) - 0.5 * np.kron(decay, identity) - 0.5 * np.kron(identity, decay.T)
    return generator


class _DirectStepper:
    """
    RK4 on the density matrix, with H_eff = H − (i/2)Σ L†L.
    """

    def __init__(self, family: HamiltonianFamily, operators: List[np.ndarray], dt: float):
        self.family = family
        self.dt = dt
        self.operators = operators
        self.decay = sum((op.conj().T @ op for op in operators), np.zeros_like(family.static.matrix))

    def _rhs(self, t: float, rho: np.ndarray) -> np.ndarray:
        h_eff = self.family.matrix_at(t) - 0.5j * self.decay
        drho = -1j * (h_eff @ rho - rho @ h_eff.conj().T)
        for op in self.operators:
            drho += op @ rho @ op.conj().T
        return drho

    def advance(self, rho: np.ndarray, start: int, count: int) -> np.ndarray:
        dt = self.dt
        for step in range(start, start + count):
            t = step * dt
            k1 = self._rhs(t, rho)
            k2 = self._rhs(t + 0.5 * dt, rho + 0.5 * dt * k1)
            k3 = self._rhs(t + 0.5 * dt, rho + 0.5 * dt * k2)
            k4 = self._rhs(t + dt, rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return rho


class _PeriodicStepper:
    """
    Cached RK4 step matrices for a family with one drive period of N steps.
    Step j of every period uses the same matrix, and whole periods collapse
    into a single period propagator.
    """

    def __init__(self, family: HamiltonianFamily, operators: List[np.ndarray], dt: float, per_period: int):
        dim = family.space.dim
        self.dim = dim
        self.per_period = per_period
        static = hamiltonian_superoperator(family.static.matrix) + dissipator_superoperator(operators, dim)
        tones = [(term, hamiltonian_superoperator(term.operator.matrix)) for term in family.terms]

        def generator(t):
            total = static.copy()
            for term, superoperator in tones:
                total += math.cos(term.frequency * t + term.phase) * superoperator
            return total

        identity = np.eye(dim * dim)
        self.steps = []
        for j in range(per_period):
            t = j * dt
            start, half, end = generator(t), generator(t + 0.5 * dt), generator(t + dt)
            k1 = start
            k2 = half @ (identity + 0.5 * dt * k1)
            k3 = half @ (identity + 0.5 * dt * k2)
            k4 = end @ (identity + dt * k3)
            self.steps.append(identity + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))

        period = identity
        for step in self.steps:
            period = step @ period
        self.period = period
        self._powers = {1: period}

    def _period_power(self, n: int) -> np.ndarray:
        if n not in self._powers:
            self._powers[n] = np.linalg.matrix_power(self.period, n)
        return self._powers[n]

    def advance(self, rho: np.ndarray, start: int, count: int) -> np.ndarray:
        vector = rho.reshape(-1)
        if start % self.per_period == 0 and count % self.per_period == 0:
            vector = self._period_power(count // self.per_period) @ vector
        else:
            for step in range(start, start + count):
                vector = self.steps[step % self.per_period] @ vector
        return vector.reshape(self.dim, self.dim)


def _make_stepper(family: HamiltonianFamily, operators: List[np.ndarray], cfg: PropagationConfig):
    period = family.period
    dim = family.space.dim
    if period is not None and dim * dim <= CACHE_DIMENSION_LIMIT:
        per_period = period / cfg.dt
        if abs(per_period - round(per_period)) < 1e-6 * per_period:
            return _PeriodicStepper(family, operators, cfg.dt, int(round(per_period)))
    return _DirectStepper(family, operators, cfg.dt)


def check_density_matrix(rho: np.ndarray, dim: int):
    if rho.shape != (dim, dim):
        raise ValueError('Initial state has shape %r, expected (%d, %d)' % (rho.shape, dim, dim))
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError('Initial state is not Hermitian')
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError('Initial state does not have unit trace')
    if np.linalg.eigvalsh(rho)[0] < -1e-10:
        raise ValueError('Initial state is not positive semidefinite')


def check_step(family: HamiltonianFamily, dec: DecoherenceParams, cfg: PropagationConfig):
    limit = TWO_PI / fastest_frequency(family, dec) / settings.STEPS_PER_PERIOD
    if cfg.dt > limit * (1.0 + 1e-9):
        raise ConfigurationError(
            'Step %g exceeds the stability bound %g for this model' % (cfg.dt, limit),
            field='propagation.dt',
            suggested_dt=limit,
        )


def propagate(family: HamiltonianFamily, dec: DecoherenceParams, rho0: np.ndarray,
              cfg: PropagationConfig) -> TrajectoryResult:
    """
    Integrate from `rho0` over `cfg`. A run that leaves the physical set is
    repeated with half the step, up to STEP_HALVINGS times, before the
    violation is raised. Record times do not change between attempts.
    """
    space = family.space
    rho0 = np.array(rho0, dtype=np.complex128)
    check_density_matrix(rho0, space.dim)
    check_step(family, dec, cfg)

    operators = collapse_operators(dec, space)
    halvings = settings.STEP_HALVINGS
    while True:
        try:
            return _integrate(family, operators, rho0, cfg)
        except InvariantViolation as error:
            if 'suggested_dt' not in error.extras or halvings <= 0:
                raise
            logger.warning('%s; retrying with step %g', error, cfg.dt / 2.0)
            cfg = replace(cfg, dt=cfg.dt / 2.0, record_stride=2 * cfg.record_stride)
            halvings -= 1


def _integrate(family: HamiltonianFamily, operators: List[np.ndarray], rho0: np.ndarray,
               cfg: PropagationConfig) -> TrajectoryResult:
    space = family.space
    dim = space.dim
    stepper = _make_stepper(family, operators, cfg)
    excited = np.real(np.diag(excited_projector(space).matrix))
    has_resonator = len(space.factor_dims) > 1
    if has_resonator:
        n_levels = space.factor_dims[1]
        number = np.tile(np.arange(n_levels, dtype=float), 2)
        edge = np.tile(np.arange(n_levels) == n_levels - 1, 2)

    n_steps = cfg.n_steps
    logger.debug('Propagating %d steps of %g on a %d-dimensional space with %s',
                 n_steps, cfg.dt, dim, type(stepper).__name__)

    times, populations, photons = [], [], []
    max_drift, min_eigenvalue = 0.0, 0.0
    truncation_warned = False
    trace_tolerance = settings.TRACE_TOLERANCE
    truncation_tolerance = settings.TRUNCATION_TOLERANCE

    rho = rho0
    step = 0
    while True:
        diagonal = np.real(np.diag(rho))
        drift = abs(float(np.sum(diagonal)) - 1.0)
        lowest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        max_drift = max(max_drift, drift)
        min_eigenvalue = min(min_eigenvalue, lowest)
        if drift > trace_tolerance or lowest < -trace_tolerance:
            raise InvariantViolation(
                'Density matrix left the physical set at t=%g (trace drift %.3g, lowest eigenvalue %.3g); '
                'reduce the step size' % (step * cfg.dt, drift, lowest),
                dt=cfg.dt,
                suggested_dt=cfg.dt / 2.0,
            )

        if has_resonator:
            edge_population = float(np.sum(diagonal[edge]))
            if edge_population > truncation_tolerance:
                raise InvariantViolation(
                    'Fock truncation breached: population %.3g in |n_max=%d>' % (edge_population, n_levels - 1),
                    population=edge_population,
                    n_max=n_levels - 1,
                )
            if edge_population > 0.1 * truncation_tolerance and not truncation_warned:
                logger.warning('Population %.3g is approaching the Fock truncation', edge_population)
                truncation_warned = True
            photons.append(float(np.dot(number, diagonal)))

        times.append(step * cfg.dt)
        populations.append(float(np.dot(excited, diagonal)))

        if step >= n_steps:
            break
        count = min(cfg.record_stride, n_steps - step)
        rho = stepper.advance(rho, step, count)
        step += count

    return TrajectoryResult(
        times=np.array(times),
        p_e=np.array(populations),
        photons=np.array(photons) if has_resonator else None,
        final_state=rho,
        max_trace_drift=max_drift,
        min_eigenvalue=min_eigenvalue,
        dt=cfg.dt,
    )


def ground_state(space: HilbertSpace) -> np.ndarray:
    indices = (GROUND,) + (0,) * (len(space.factor_dims) - 1)
    return density_matrix(basis_state(space, *indices))


def coherent_ket(n_max: int, alpha: complex) -> np.ndarray:
    """
    Truncated coherent state |α⟩, renormalized on |0⟩ … |n_max⟩.
    """
    ket = np.zeros(n_max + 1, dtype=np.complex128)
    ket[0] = math.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, n_max + 1):
        ket[n] = ket[n - 1] * alpha / math.sqrt(n)
    return ket / np.linalg.norm(ket)


def ground_coherent_state(n_max: int, alpha: complex) -> np.ndarray:
    qubit = np.zeros(2, dtype=np.complex128)
    qubit[GROUND] = 1.0
    return density_matrix(np.kron(qubit, coherent_ket(n_max, alpha)))


def steady_state_pe(family: HamiltonianFamily, dec: DecoherenceParams, cfg: PropagationConfig,
                    rho0: np.ndarray = None) -> float:
    """
    Mean p_e over the final `steady_window` fraction of the run. The mean
    over the preceding window of the same length must agree within the
    convergence threshold.
    """
    if not dec.gamma1 > 0.0:
        raise ValueError('A steady state requires γ1 > 0')
    if rho0 is None:
        rho0 = ground_state(family.space)

    result = propagate(family, dec, rho0, cfg)
    window = cfg.steady_window
    last = result.window(1.0 - window)
    previous = result.window(1.0 - 2.0 * window, 1.0 - window)
    if len(last) == 0 or len(previous) == 0:
        raise ConfigurationError('The steady-state window holds no samples; record more often',
                                 field='propagation.record_stride')

    value = float(np.mean(last))
    drift = abs(value - float(np.mean(previous)))
    if drift > settings.CONVERGENCE_THRESHOLD:
        raise ConvergenceError(
            'p_e did not settle: window-to-window drift %.3g exceeds %.3g'
            % (drift, settings.CONVERGENCE_THRESHOLD),
            drift=drift,
        )
    return value


def settling_time(dec: DecoherenceParams) -> float:
    return SETTLING_RELAXATION_TIMES / dec.gamma1


def qubit_steady_state(q: QubitParams, d: DriveSpec, dec: DecoherenceParams,
                       amplitudes: DriveAmplitudes = None, steps_per_period: int = None) -> float:
    """
    Oracle steady state of the driven two-level qubit.
    """
    if not dec.gamma1 > 0.0:
        raise ValueError('A steady state requires γ1 > 0')
    family = driven_qubit_family(q, d, amplitudes)
    cfg = PropagationConfig.for_family(family, settling_time(dec), dec, steps_per_period=steps_per_period)
    return steady_state_pe(family, dec, cfg)


def analytic_steady_state_pe(rabi: float, detuning: float, dec: DecoherenceParams) -> float:
    """
    Driven two-level steady state

        p_e = (Ω²/2)(γ2/γ1) / (δ² + γ2² + Ω²γ2/γ1)

    lifted by a thermal population p as p + (1 − 2p)·p_e.
    """
    if not dec.gamma1 > 0.0:
        raise ValueError('A steady state requires γ1 > 0')
    gamma1, gamma2 = dec.gamma1, dec.gamma2
    saturation = rabi ** 2 * gamma2 / gamma1
    cold = 0.5 * saturation / (detuning ** 2 + gamma2 ** 2 + saturation)
    p = dec.thermal_population
    return p + (1.0 - 2.0 * p) * cold


def _rabi_model(t, amplitude, frequency):
    return amplitude * np.sin(frequency * t / 2.0) ** 2


def extract_rabi(times: np.ndarray, p_e: np.ndarray) -> RabiFit:
    """
    Fit p_e(t) = P·sin²(Ωt/2) on a uniform time grid. The initial guess
    for Ω comes from the peak of a zero-padded spectrum.
    """
    times = np.asarray(times, dtype=float)
    p_e = np.asarray(p_e, dtype=float)
    if len(times) < 8:
        raise ValueError('At least 8 samples are needed to extract a Rabi frequency')

    spacing = times[1] - times[0]
    signal = p_e - np.mean(p_e)
    padded = 8 * len(signal)
    spectrum = np.abs(np.fft.rfft(signal, n=padded))
    frequencies = np.fft.rfftfreq(padded, d=spacing)
    peak = int(np.argmax(spectrum[1:])) + 1
    seed = TWO_PI * frequencies[peak]
    amplitude_seed = max(float(np.max(p_e)), 1e-6)

    (amplitude, frequency), _ = curve_fit(
        _rabi_model, times, p_e, p0=(amplitude_seed, seed), maxfev=20000,
    )
    return RabiFit(frequency=abs(float(frequency)), amplitude=float(amplitude))


def dressed_frequencies(q: QubitParams, r: ResonatorParams, c: CouplingParams) -> dict:
    """
    Transition frequencies of the coupled, undriven system.
    """
    h_static = build_h_system(q, r, c)
    energies, vectors = np.linalg.eigh(h_static.matrix)
    space = h_static.space

    def energy(qubit, n):
        return float(energies[dressed_index(vectors, basis_state(space, qubit, n))])

    g0, g1 = energy(GROUND, 0), energy(GROUND, 1)
    e0, e1 = energy(EXCITED, 0), energy(EXCITED, 1)
    return {
        'qubit': e0 - g0,
        'resonator': g1 - g0,
        RED: e0 - g1,
        BLUE: e1 - g0,
    }


def sideband_drive_run(q: QubitParams, r: ResonatorParams, c: CouplingParams,
                       amplitudes: DriveAmplitudes, dec: DecoherenceParams, duration: float,
                       sideband: str = BLUE, photons: float = None, baseline: bool = False,
                       frequencies: dict = None) -> TrajectoryResult:
    """
    Drive a sideband of the full qubit-resonator model, starting from the
    qubit ground state and a coherent resonator state with `photons` mean
    occupation held by a resonant readout tone.

    `baseline` repeats the run with the qubit-resonator coupling switched
    off at the same drive frequency.
    """
    if sideband not in (RED, BLUE):
        raise ValueError('Unknown sideband %r' % sideband)
    photons = settings.SIDEBAND_PHOTONS if photons is None else photons
    if photons < 0.0:
        raise ValueError('Photon number must be non-negative')
    if photons > r.n_max - 2:
        raise ValueError('n_max=%d is too small for %g photons' % (r.n_max, photons))

    if photons > 0.0 and not dec.kappa > 0.0:
        raise ValueError('Holding a readout population requires resonator decay (kappa > 0)')

    frequencies = frequencies or dressed_frequencies(q, r, c)
    drive = DriveSpec(omega=frequencies[sideband])
    readout = None
    if photons > 0.0:
        readout = ReadoutTone.for_photons(frequencies['resonator'], photons, dec.kappa)

    coupling = CouplingParams(0.0, 0.0) if baseline else c
    family = driven_system_family(q, r, coupling, drive, amplitudes=amplitudes, readout=readout)
    rho0 = ground_coherent_state(r.n_max, -1j * math.sqrt(photons))
    cfg = PropagationConfig.for_family(family, duration, dec)

    logger.info('Running %s sideband%s at %.6g rad/s for %g', sideband,
                ' baseline' if baseline else '', drive.omega, duration)
    return propagate(family, dec, rho0, cfg)
