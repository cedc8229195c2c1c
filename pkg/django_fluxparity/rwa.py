"""
Rotating-wave transition amplitudes.

Every amplitude is returned with ħ factored out, in angular-frequency units.
An amplitude A is the coefficient of σ_x (or of the sideband hopping term)
in the effective Hamiltonian, so a resonant drive produces Rabi
oscillations at 2|A|.
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from .model import (
    BASIS_EIGEN,
    CouplingParams,
    DriveAmplitudes,
    DriveSpec,
    HamiltonianFamily,
    QubitParams,
    ResonatorParams,
    build_h_system,
    drive_amplitudes,
    drive_operator,
    oriented_longitudinal,
    qubit_frequency,
)
from .operators import EXCITED, GROUND, HilbertSpace, LabeledOperator, basis_state, embed_qubit, pauli
from .settings import fluxparity_settings as settings

logger = logging.getLogger(__name__)

ONE_PHOTON = 'one_photon'
TWO_PHOTON = 'two_photon'
RED_SIDEBAND = 'red_sideband'
BLUE_SIDEBAND = 'blue_sideband'
BLUE_TWO_PHOTON = 'blue_two_photon'

PROCESSES = (ONE_PHOTON, TWO_PHOTON, RED_SIDEBAND, BLUE_SIDEBAND, BLUE_TWO_PHOTON)

TWO_PHOTON_CLOSED = 'closed'
TWO_PHOTON_BESSEL = 'bessel'

SERIES_CUTOFF = 1e-16
SERIES_MAX_TERMS = 200


@dataclass(frozen=True)
class TransitionAmplitude:
    process: str
    theta: float
    value: float

    def __post_init__(self):
        if self.process not in PROCESSES:
            raise ValueError('Unknown process %r' % self.process)
        object.__setattr__(self, 'value', float(self.value))

    @property
    def rabi_frequency(self) -> float:
        return 2.0 * abs(self.value)


@dataclass(frozen=True)
class SidebandRates:
    gamma_plus: float
    gamma_minus: float
    delta_prime: float
    dispersive: float


class TransparencyAngles(NamedTuple):
    theta_star: float
    theta_mirror: float
    degenerate: bool = False


def bessel_j(k: int, x: float) -> float:
    """
    Bessel function of the first kind J_k(x) from its ascending series

        J_k(x) = Σ_m (-1)^m (x/2)^(2m+k) / (m! (m+k)!)

    summed until a term falls below 1e-16 of the running sum. The series
    is only used on |x| ≤ 12, where cancellation stays below 1e-10.
    """
    if k not in (0, 1, 2, 3):
        raise ValueError('Bessel order must be one of 0..3, got %r' % k)
    domain = settings.BESSEL_DOMAIN
    if abs(x) > domain:
        raise ValueError('Bessel series is limited to |x| <= %g, got %r' % (domain, x))

    half = x / 2.0
    term = half ** k / math.factorial(k)
    total = term
    quarter_square = half * half

    for m in range(1, SERIES_MAX_TERMS):
        term *= -quarter_square / (m * (m + k))
        total += term
        if abs(term) <= SERIES_CUTOFF * abs(total):
            break

    return total


def lambda_param(longitudinal: float, transversal: float, theta: float, omega: float) -> float:
    """
    λ = (Ω_t cosθ + Ω_ℓ sinθ)/ω, the modulation depth of the rotating frame.
    """
    if not omega > 0.0:
        raise ValueError('Drive frequency must be positive, got %r' % omega)
    longitudinal = oriented_longitudinal(longitudinal, theta)
    return (transversal * math.cos(theta) + longitudinal * math.sin(theta)) / omega


def _one_photon_factor(longitudinal: float, transversal: float, theta: float) -> float:
    longitudinal = oriented_longitudinal(longitudinal, theta)
    return longitudinal / 2.0 * math.cos(theta) - transversal / 2.0 * math.sin(theta)


def _sideband_factor(longitudinal: float, transversal: float, theta: float) -> float:
    longitudinal = oriented_longitudinal(longitudinal, theta)
    return longitudinal / 2.0 * math.sin(theta) - transversal / 2.0 * math.cos(theta)


class RotatingFrameFamily:
    """
    H_rot(t) = U H(t) U† + i(∂U/∂t)U† with U = exp[(i/2)σ_z λ sin(ωt)].

    The frame removes the cos(ωt)σ_z part of the drive; the remaining
    transverse terms pick up the phase factors e^{∓iϕ}, ϕ = -λ sin(ωt).
    """

    def __init__(self, family: HamiltonianFamily, lam: float, omega: float):
        if family.space.factor_dims[0] != 2:
            raise ValueError('The rotating frame acts on a leading qubit factor')
        self.family = family
        self.lam = lam
        self.omega = omega
        rest = int(np.prod(family.space.factor_dims[1:])) if len(family.space.factor_dims) > 1 else 1
        self._sigma_z = np.kron(pauli('z').matrix, np.eye(rest))
        self._z_diagonal = np.diag(self._sigma_z).real

    @property
    def space(self) -> HilbertSpace:
        return self.family.space

    def phase(self, t: float) -> float:
        return -self.lam * math.sin(self.omega * t)

    def unitary(self, t: float) -> np.ndarray:
        chi = self.lam * math.sin(self.omega * t)
        return np.diag(np.exp(0.5j * chi * self._z_diagonal))

    def matrix_at(self, t: float) -> np.ndarray:
        u = self.unitary(t)
        rotated = u @ self.family.matrix_at(t) @ u.conj().T
        return rotated - 0.5 * self.lam * self.omega * math.cos(self.omega * t) * self._sigma_z

    def at(self, t: float) -> LabeledOperator:
        return LabeledOperator(self.space, self.matrix_at(t), 'H_rot(t=%g)' % t)

    def sigma_z_projection(self, t: float) -> float:
        """
        Coefficient of σ_z ⊗ I in H_rot(t).
        """
        return float(np.real(np.trace(self._sigma_z @ self.matrix_at(t)))) / self._sigma_z.shape[0]


def rotating_frame(family: HamiltonianFamily, q: QubitParams, d: DriveSpec,
                   amplitudes: DriveAmplitudes = None) -> RotatingFrameFamily:
    if amplitudes is None:
        amplitudes = drive_amplitudes(d, qubit_frequency(q))
    lam = lambda_param(amplitudes[0], amplitudes[1], q.theta, d.omega)
    return RotatingFrameFamily(family, lam, d.omega)


def one_photon_amplitude(longitudinal: float, transversal: float, theta: float, omega: float,
                         approximate: bool = False) -> TransitionAmplitude:
    """
    (1/2)[(Ω_ℓ/2)cosθ − (Ω_t/2)sinθ][J_0(λ) + J_2(λ)]

    `approximate` drops the Bessel factor (its small-λ limit of 1).
    """
    factor = _one_photon_factor(longitudinal, transversal, theta)
    if approximate:
        bessel = 1.0
    else:
        lam = lambda_param(longitudinal, transversal, theta, omega)
        bessel = bessel_j(0, lam) + bessel_j(2, lam)
    return TransitionAmplitude(ONE_PHOTON, theta, 0.5 * factor * bessel)


def two_photon_amplitude(longitudinal: float, transversal: float, theta: float, omega: float,
                         variant: str = TWO_PHOTON_CLOSED) -> TransitionAmplitude:
    """
    Two-photon amplitude for a drive near ω_q/2.

    The closed form is
        (1/8ω)[(Ω_t² − Ω_ℓ²) sinθ cosθ + Ω_ℓΩ_t (sin²θ − cos²θ)],
    the `bessel` variant keeps (1/2)[(Ω_ℓ/2)cosθ − (Ω_t/2)sinθ][−J_1(λ) − J_3(λ)].
    """
    if not omega > 0.0:
        raise ValueError('Drive frequency must be positive, got %r' % omega)

    if variant == TWO_PHOTON_BESSEL:
        lam = lambda_param(longitudinal, transversal, theta, omega)
        factor = _one_photon_factor(longitudinal, transversal, theta)
        value = 0.5 * factor * (-bessel_j(1, lam) - bessel_j(3, lam))
    elif variant == TWO_PHOTON_CLOSED:
        longitudinal = oriented_longitudinal(longitudinal, theta)
        sin, cos = math.sin(theta), math.cos(theta)
        value = (
            (transversal ** 2 - longitudinal ** 2) * sin * cos
            + longitudinal * transversal * (sin ** 2 - cos ** 2)
        ) / (8.0 * omega)
    else:
        raise ValueError('Unknown two-photon variant %r' % variant)

    return TransitionAmplitude(TWO_PHOTON, theta, value)


def sideband_rates(g_t: float, gap: float, omega_r: float) -> SidebandRates:
    if gap == omega_r or gap == -omega_r:
        raise ValueError('Sideband rates diverge for Δ = ±ω_r (Δ=%r, ω_r=%r)' % (gap, omega_r))
    gamma_plus = g_t / (gap + omega_r)
    gamma_minus = g_t / (gap - omega_r)
    return SidebandRates(
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        delta_prime=gap + (gamma_plus + gamma_minus) / 2.0,
        dispersive=g_t * (gamma_plus + gamma_minus),
    )


def sideband_amplitudes(longitudinal: float, transversal: float, theta: float,
                        g_t: float, gap: float,
                        omega_r: float) -> Tuple[TransitionAmplitude, TransitionAmplitude, SidebandRates]:
    """
    Red and blue sideband amplitudes −(1/2)[(Ω_ℓ/2)sinθ − (Ω_t/2)cosθ]·2γ_∓,
    with γ_± = g_t/(Δ ± ω_r) taken at the bare gap Δ.
    """
    rates = sideband_rates(g_t, gap, omega_r)
    factor = _sideband_factor(longitudinal, transversal, theta)
    red = TransitionAmplitude(RED_SIDEBAND, theta, -0.5 * factor * 2.0 * rates.gamma_minus)
    blue = TransitionAmplitude(BLUE_SIDEBAND, theta, -0.5 * factor * 2.0 * rates.gamma_plus)
    return red, blue, rates


def transparency_angles(longitudinal: float, transversal: float) -> TransparencyAngles:
    """
    Bloch angles where the one-photon amplitude vanishes, tanθ* = Ω_ℓ/Ω_t,
    and its mirror π − θ*.
    """
    if transversal < 0.0 or longitudinal < 0.0:
        raise ValueError('Drive amplitudes must be non-negative')
    if transversal == 0.0:
        logger.warning('No transparency angle for a purely longitudinal drive')
        return TransparencyAngles(math.pi / 2.0, math.pi / 2.0, degenerate=True)

    theta_star = math.atan(longitudinal / transversal)
    return TransparencyAngles(theta_star, math.pi - theta_star)


def multi_photon_parity(n: int) -> int:
    """
    Parity picked up by n applications of an odd operator, (-1)^n.
    """
    if n < 0:
        raise ValueError('Photon number must be non-negative, got %r' % n)
    return -1 if n % 2 else 1


def dressed_index(eigenvectors: np.ndarray, ket: np.ndarray) -> int:
    """
    Index of the eigenvector with the largest overlap with a bare ket.
    """
    return int(np.argmax(np.abs(eigenvectors.conj().T @ ket) ** 2))


def second_order_amplitude(energies: np.ndarray, coupling: np.ndarray,
                           initial: int, final: int) -> Tuple[float, float]:
    """
    Effective two-photon amplitude between two eigenstates under a drive
    cos(ωt)·D, with D given in the eigenbasis and ω = (E_f − E_i)/2:

        (1/4) Σ_m D_fm D_mi / (E_i + ω − E_m)

    :return: (amplitude, resonant drive frequency ω)
    """
    omega = (energies[final] - energies[initial]) / 2.0
    denominators = energies[initial] + omega - energies
    scale = max(abs(omega), 1.0)
    if np.any(np.abs(denominators) < 1e-12 * scale):
        raise ValueError('Intermediate level resonant with the two-photon drive')
    value = 0.25 * np.sum(coupling[final, :] * coupling[:, initial] / denominators)
    return float(np.real(value)), float(omega)


def two_photon_sideband_amplitude(q: QubitParams, r: ResonatorParams, c: CouplingParams,
                                  amplitudes: DriveAmplitudes, n: int = 0) -> TransitionAmplitude:
    """
    Blue two-photon sideband |g, n⟩ → |e, n+1⟩, driven at half the dressed
    transition frequency. Second-order sum over the dressed eigenstates of
    the static qubit-resonator Hamiltonian.
    """
    if n + 1 > r.n_max:
        raise ValueError('n_max=%d cannot hold the final Fock level %d' % (r.n_max, n + 1))

    h_static = build_h_system(q, r, c, BASIS_EIGEN)
    energies, vectors = np.linalg.eigh(h_static.matrix)
    space = h_static.space
    initial = dressed_index(vectors, basis_state(space, GROUND, n))
    final = dressed_index(vectors, basis_state(space, EXCITED, n + 1))

    drive = embed_qubit(drive_operator(q, DriveAmplitudes(*amplitudes)), r.n_max).matrix
    coupling = vectors.conj().T @ drive @ vectors
    value, _ = second_order_amplitude(energies, coupling, initial, final)
    return TransitionAmplitude(BLUE_TWO_PHOTON, q.theta, value)


def process_frequency(process: str, omega_q: float, omega_r: float) -> float:
    """
    Drive frequency at which a process is resonant in the uncoupled spectrum.
    """
    return {
        ONE_PHOTON: omega_q,
        TWO_PHOTON: omega_q / 2.0,
        RED_SIDEBAND: omega_q - omega_r,
        BLUE_SIDEBAND: omega_q + omega_r,
        BLUE_TWO_PHOTON: (omega_q + omega_r) / 2.0,
    }[process]


def process_amplitude(process: str, q: QubitParams, amplitudes: DriveAmplitudes,
                      r: ResonatorParams = None, c: CouplingParams = None) -> TransitionAmplitude:
    """
    Dispatch to the analytic amplitude of `process` at the operating point q.
    """
    longitudinal, transversal = amplitudes
    theta = q.theta
    omega_q = q.omega_q

    if process == ONE_PHOTON:
        return one_photon_amplitude(longitudinal, transversal, theta, omega_q)
    if process == TWO_PHOTON:
        return two_photon_amplitude(longitudinal, transversal, theta, omega_q / 2.0)

    if r is None or c is None:
        raise ValueError('Process %r needs resonator and coupling parameters' % process)
    if process in (RED_SIDEBAND, BLUE_SIDEBAND):
        red, blue, _ = sideband_amplitudes(longitudinal, transversal, theta, c.g_t, q.gap, r.omega_r)
        return red if process == RED_SIDEBAND else blue
    if process == BLUE_TWO_PHOTON:
        return two_photon_sideband_amplitude(q, r, c, amplitudes)
    raise ValueError('Unknown process %r' % process)
