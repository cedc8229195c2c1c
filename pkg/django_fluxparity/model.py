"""
Physical parameter types and Hamiltonian builders for the driven flux
qubit coupled to a resonator.

All frequencies are angular (rad/s) with ħ factored out; Hamiltonians are
therefore angular-frequency valued operators.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .operators import (
    HilbertSpace,
    LabeledOperator,
    boson_ops,
    embed_qubit,
    embed_resonator,
    identity,
    pauli,
    tensor,
)
from .util import boltzmann_factor, db_to_amplitude, wrap_phase

BASIS_BARE = 'bare'
BASIS_EIGEN = 'eigen'

SINGLE_LOOP = 'single_loop'
GRADIOMETER = 'gradiometer'


@dataclass(frozen=True)
class QubitParams:
    gap: float
    bias: float = 0.0

    def __post_init__(self):
        if not self.gap > 0.0:
            raise ValueError('Qubit gap must be positive, got %r' % self.gap)

    @property
    def omega_q(self) -> float:
        return qubit_frequency(self)

    @property
    def theta(self) -> float:
        return bloch_angle(self)

    @classmethod
    def from_angle(cls, theta: float, omega_q: float = None, gap: float = None) -> 'QubitParams':
        """
        Operating point at Bloch angle `theta`.

        With `gap` the point lies on the flux-qubit hyperbola at fixed Δ
        (ω_q = Δ/sinθ); with `omega_q` the qubit frequency is held fixed and
        Δ = ω_q·sinθ.
        """
        if not 0.0 < theta < math.pi:
            raise ValueError('Bloch angle must lie in (0, π), got %r' % theta)
        if (omega_q is None) == (gap is None):
            raise ValueError('Exactly one of omega_q or gap must be given')

        if gap is None:
            gap = omega_q * math.sin(theta)
            bias = omega_q * math.cos(theta)
        else:
            bias = gap * math.cos(theta) / math.sin(theta)
        return cls(gap=gap, bias=bias)


@dataclass(frozen=True)
class ResonatorParams:
    omega_r: float
    kappa_x: float
    kappa_i: float
    n_max: int = 8

    def __post_init__(self):
        for name in ('omega_r', 'kappa_x', 'kappa_i'):
            if not getattr(self, name) > 0.0:
                raise ValueError('Resonator %s must be positive, got %r' % (name, getattr(self, name)))
        if self.n_max < 1:
            raise ValueError('n_max must be at least 1, got %r' % self.n_max)

    @property
    def kappa_total(self) -> float:
        return self.kappa_x + self.kappa_i


@dataclass(frozen=True)
class CouplingParams:
    g_t: float
    g_l: float = 0.0

    def __post_init__(self):
        if self.g_t < 0.0 or self.g_l < 0.0:
            raise ValueError('Coupling strengths must be non-negative, got g_t=%r g_l=%r' % (self.g_t, self.g_l))


@dataclass(frozen=True)
class DriveSpec:
    omega: float
    phi: float = math.pi
    omega_max: float = 0.0
    imbalance_db: float = 0.0
    temperature: float = 0.0
    leakage_db: Optional[float] = None

    def __post_init__(self):
        if self.omega_max < 0.0:
            raise ValueError('Drive amplitude must be non-negative, got %r' % self.omega_max)
        if self.temperature < 0.0:
            raise ValueError('Effective temperature must be non-negative, got %r' % self.temperature)
        object.__setattr__(self, 'phi', wrap_phase(self.phi))


@dataclass(frozen=True)
class LoopGeometry:
    area: float
    current: float
    separation_d: float = 0.0
    kind: str = SINGLE_LOOP

    def __post_init__(self):
        if self.kind not in (SINGLE_LOOP, GRADIOMETER):
            raise ValueError('Unknown loop kind %r' % self.kind)
        if not self.area > 0.0:
            raise ValueError('Loop area must be positive, got %r' % self.area)
        if self.kind == GRADIOMETER and not self.separation_d > 0.0:
            raise ValueError('A gradiometer requires a positive separation_d')
        if self.kind == SINGLE_LOOP and self.separation_d != 0.0:
            raise ValueError('separation_d only applies to gradiometers')


class DriveAmplitudes(NamedTuple):
    longitudinal: float
    transversal: float


def bloch_angle(q: QubitParams) -> float:
    return math.atan2(q.gap, q.bias)


def qubit_frequency(q: QubitParams) -> float:
    return math.hypot(q.gap, q.bias)


def stray_population(omega_q: float, temperature: float) -> float:
    return boltzmann_factor(omega_q, temperature)


def drive_amplitudes(d: DriveSpec, omega_q: float) -> DriveAmplitudes:
    """
    Split the two-antenna drive into its longitudinal and transversal
    parts. Symmetric fields (φ = 0) couple longitudinally, antisymmetric
    ones (φ = π) transversally. The thermal floor p_e^str·ω_q is added to
    the transversal amplitude.

    An antenna imbalance only rescales Ω_max by (1 + 10^(−dB/20))/2; it
    leaves the symmetric/antisymmetric split untouched. Only `leakage_db`
    feeds the extinguished quadrature.
    """
    iota = (1.0 + db_to_amplitude(d.imbalance_db)) / 2.0
    symmetric = abs(math.cos(d.phi / 2.0))
    antisymmetric = abs(math.sin(d.phi / 2.0))

    longitudinal = d.omega_max * symmetric * iota
    transversal = d.omega_max * antisymmetric * iota

    if d.leakage_db is not None:
        leakage = db_to_amplitude(d.leakage_db)
        longitudinal += d.omega_max * leakage * antisymmetric
        transversal += d.omega_max * leakage * symmetric

    transversal += stray_population(omega_q, d.temperature) * omega_q
    return DriveAmplitudes(longitudinal, transversal)


def multipole_moments(g: LoopGeometry) -> Tuple[float, float]:
    """
    :return: (dipole moment p in A·m², quadrupole moment Q in A·m³)
    """
    if g.kind == GRADIOMETER:
        return 0.0, 4.0 * g.current * g.area * g.separation_d / 3.0
    return abs(g.current) * g.area, 0.0


def field_coupling(b_sym: float, b_grad: float,
                   squid: LoopGeometry, gradiometer: LoopGeometry) -> Tuple[float, float]:
    """
    Energies (J) of the longitudinal and transversal field couplings,
    ħΩ_ℓ = p·B_sym for the SQUID loop and ħΩ_t = Q·δB/δx for the gradiometer.
    """
    if squid.kind != SINGLE_LOOP:
        raise ValueError('The longitudinal coupling is set by a single (SQUID) loop')
    if gradiometer.kind != GRADIOMETER:
        raise ValueError('The transversal coupling is set by a gradiometer loop')

    p, _ = multipole_moments(squid)
    _, quadrupole = multipole_moments(gradiometer)
    return p * b_sym, quadrupole * b_grad


def single_loop_coupling(b_z0: float, b_grad: float, loop: LoopGeometry) -> float:
    """
    σ_x coupling energy (J) of a single-loop flux qubit, B_z0·p + Q·δB/δx.
    A single loop carries no quadrupole moment, so only the averaged field
    contributes.
    """
    if loop.kind != SINGLE_LOOP:
        raise ValueError('single_loop_coupling requires a single_loop geometry')
    p, quadrupole = multipole_moments(loop)
    return b_z0 * p + quadrupole * b_grad


def oriented_longitudinal(longitudinal: float, theta: float) -> float:
    """
    The longitudinal drive acts with the sign of the bias ε, so a qubit
    tilted the other way (θ > π/2) sees Ω_ℓ reversed.
    """
    return -longitudinal if math.cos(theta) < 0.0 else longitudinal


def _rotated_paulis(theta: float) -> Tuple[LabeledOperator, LabeledOperator]:
    """
    Bare σ_z and σ_x written in the qubit eigenbasis.
    """
    sx, sz = pauli('x'), pauli('z')
    cos, sin = math.cos(theta), math.sin(theta)
    bare_z = LabeledOperator(sz.space, cos * sz.matrix - sin * sx.matrix, 'σ_z(bare)')
    bare_x = LabeledOperator(sz.space, sin * sz.matrix + cos * sx.matrix, 'σ_x(bare)')
    return bare_z, bare_x


def build_h_qubit(q: QubitParams, basis: str = BASIS_EIGEN) -> LabeledOperator:
    if basis == BASIS_EIGEN:
        return LabeledOperator(HilbertSpace.qubit(), qubit_frequency(q) / 2.0 * pauli('z').matrix, 'H_q')
    if basis == BASIS_BARE:
        matrix = (q.gap * pauli('x').matrix + q.bias * pauli('z').matrix) / 2.0
        return LabeledOperator(HilbertSpace.qubit(), matrix, "H_q'")
    raise ValueError('Unknown basis %r' % basis)


def build_h_system(q: QubitParams, r: ResonatorParams, c: CouplingParams,
                   basis: str = BASIS_EIGEN) -> LabeledOperator:
    """
    Static qubit-resonator Hamiltonian

        (Δσ_x + εσ_z)/2 + ω_r a†a + g_t(a + a†)σ_z + g_ℓ(a + a†)σ_x

    in the bare basis, or the same operator expressed in the qubit
    eigenbasis where the qubit term is ω_q σ_z/2.
    """
    a, a_dag, number = boson_ops(r.n_max)
    field_quadrature = LabeledOperator(a.space, a.matrix + a_dag.matrix, 'a + a†')

    if basis == BASIS_EIGEN:
        coupling_z, coupling_x = _rotated_paulis(bloch_angle(q))
    elif basis == BASIS_BARE:
        coupling_z, coupling_x = pauli('z'), pauli('x')
    else:
        raise ValueError('Unknown basis %r' % basis)

    matrix = (
        embed_qubit(build_h_qubit(q, basis), r.n_max).matrix
        + r.omega_r * embed_resonator(number).matrix
        + c.g_t * tensor(coupling_z, field_quadrature).matrix
        + c.g_l * tensor(coupling_x, field_quadrature).matrix
    )
    return LabeledOperator(HilbertSpace.composite(r.n_max), matrix, 'H_sys(%s)' % basis)


def drive_operator(q: QubitParams, amplitudes: DriveAmplitudes) -> LabeledOperator:
    """
    Eigenbasis drive operator multiplying cos(ωt):
    [(Ω_ℓcosθ − Ω_t sinθ)σ_x + (Ω_t cosθ + Ω_ℓ sinθ)σ_z]/2
    """
    theta = bloch_angle(q)
    longitudinal, transversal = amplitudes
    longitudinal = oriented_longitudinal(longitudinal, theta)
    x_coefficient = (longitudinal * math.cos(theta) - transversal * math.sin(theta)) / 2.0
    z_coefficient = (transversal * math.cos(theta) + longitudinal * math.sin(theta)) / 2.0
    matrix = x_coefficient * pauli('x').matrix + z_coefficient * pauli('z').matrix
    return LabeledOperator(HilbertSpace.qubit(), matrix, 'V')


def bare_drive_operator(q: QubitParams, amplitudes: DriveAmplitudes) -> LabeledOperator:
    longitudinal, transversal = amplitudes
    longitudinal = oriented_longitudinal(longitudinal, bloch_angle(q))
    matrix = (longitudinal * pauli('x').matrix + transversal * pauli('z').matrix) / 2.0
    return LabeledOperator(HilbertSpace.qubit(), matrix, "V'")


def _resolve_amplitudes(q: QubitParams, d: DriveSpec, amplitudes) -> DriveAmplitudes:
    if amplitudes is None:
        return drive_amplitudes(d, qubit_frequency(q))
    return DriveAmplitudes(*amplitudes)


def build_h_drive(q: QubitParams, d: DriveSpec, t: float,
                  amplitudes: DriveAmplitudes = None, n_max: int = None) -> LabeledOperator:
    """
    Drive Hamiltonian at time `t` in the qubit eigenbasis. When `n_max` is
    given the operator is embedded with identity on the resonator factor.
    """
    operator = drive_operator(q, _resolve_amplitudes(q, d, amplitudes)) * math.cos(d.omega * t)
    if n_max is not None:
        operator = embed_qubit(operator, n_max)
    return LabeledOperator(operator.space, operator.matrix, 'H_d(t)')


def build_h_drive_bare(q: QubitParams, d: DriveSpec, t: float,
                       amplitudes: DriveAmplitudes = None) -> LabeledOperator:
    operator = bare_drive_operator(q, _resolve_amplitudes(q, d, amplitudes)) * math.cos(d.omega * t)
    return LabeledOperator(operator.space, operator.matrix, "H_d'(t)")


@dataclass(frozen=True)
class DriveTerm:
    operator: LabeledOperator
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True, eq=False)
class HamiltonianFamily:
    """
    H(t) = H_0 + Σ_k cos(ω_k t + ϕ_k) H_k
    """
    static: LabeledOperator
    terms: Tuple[DriveTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for term in self.terms:
            if term.operator.space != self.static.space:
                raise ValueError('Drive term %r does not act on the static space' % term.operator.name)
        object.__setattr__(self, 'terms', tuple(self.terms))

    @property
    def space(self) -> HilbertSpace:
        return self.static.space

    def matrix_at(self, t: float) -> np.ndarray:
        matrix = np.array(self.static.matrix)
        for term in self.terms:
            matrix += math.cos(term.frequency * t + term.phase) * term.operator.matrix
        return matrix

    def at(self, t: float) -> LabeledOperator:
        return LabeledOperator(self.space, self.matrix_at(t), 'H(t=%g)' % t)

    @property
    def frequencies(self) -> Tuple[float, ...]:
        return tuple(sorted({abs(term.frequency) for term in self.terms}))

    @property
    def max_frequency(self) -> float:
        return max(self.frequencies, default=0.0)

    @property
    def period(self) -> Optional[float]:
        """
        Common period when every tone shares one frequency, else None.
        """
        frequencies = [f for f in self.frequencies if f > 0.0]
        if len(frequencies) != 1:
            return None
        return 2.0 * math.pi / frequencies[0]

    def spectral_scale(self) -> float:
        """
        Upper bound on the angular frequencies present in the dynamics:
        the spread of the static spectrum plus twice the drive norms.
        """
        eigenvalues = np.linalg.eigvalsh(self.static.matrix)
        spread = float(eigenvalues[-1] - eigenvalues[0])
        drive = sum(2.0 * float(np.linalg.norm(term.operator.matrix, 2)) for term in self.terms)
        return spread + drive

    def without_drive(self) -> 'HamiltonianFamily':
        return HamiltonianFamily(self.static)


def driven_qubit_family(q: QubitParams, d: DriveSpec,
                        amplitudes: DriveAmplitudes = None) -> HamiltonianFamily:
    """
    Two-level family ω_q σ_z/2 + cos(ωt)·V in the qubit eigenbasis.
    """
    operator = drive_operator(q, _resolve_amplitudes(q, d, amplitudes))
    terms = (DriveTerm(operator, d.omega),) if np.any(operator.matrix) else ()
    return HamiltonianFamily(build_h_qubit(q), terms)


@dataclass(frozen=True)
class ReadoutTone:
    """
    Coherent resonator drive ε·cos(ωt)(a + a†). For a resonant tone the
    steady-state photon number is (ε/κ)², so ε = κ√n̄ holds n̄ photons.
    """
    frequency: float
    amplitude: float

    @classmethod
    def for_photons(cls, frequency: float, photons: float, kappa: float) -> 'ReadoutTone':
        return cls(frequency, kappa * math.sqrt(photons))


def driven_system_family(q: QubitParams, r: ResonatorParams, c: CouplingParams, d: DriveSpec,
                         amplitudes: DriveAmplitudes = None,
                         readout: ReadoutTone = None) -> HamiltonianFamily:
    """
    Full eigenbasis qubit-resonator family with the two-antenna drive and an
    optional readout tone on the resonator.
    """
    operator = embed_qubit(drive_operator(q, _resolve_amplitudes(q, d, amplitudes)), r.n_max)
    terms = []
    if np.any(operator.matrix):
        terms.append(DriveTerm(operator, d.omega))

    if readout is not None and readout.amplitude != 0.0:
        a, a_dag, _ = boson_ops(r.n_max)
        quadrature = LabeledOperator(a.space, readout.amplitude * (a.matrix + a_dag.matrix), 'ε(a + a†)')
        terms.append(DriveTerm(embed_resonator(quadrature), readout.frequency))

    return HamiltonianFamily(build_h_system(q, r, c, BASIS_EIGEN), tuple(terms))


def system_identity(n_max: int) -> LabeledOperator:
    return identity(HilbertSpace.composite(n_max))
