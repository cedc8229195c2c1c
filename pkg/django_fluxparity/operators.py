"""
Dense operator algebra on the (qubit ⊗ resonator) Hilbert space.

Basis convention: the qubit factor is ordered (|e⟩, |g⟩), so σ_z is
diag(+1, -1) and p_e = (⟨σ_z⟩ + 1)/2. The resonator factor is the truncated
Fock basis |0⟩ … |n_max⟩. Composite indices follow numpy.kron ordering,
index = qubit_index * (n_max + 1) + n.
"""
from dataclasses import dataclass
from functools import reduce
from typing import Tuple

import numpy as np

from .settings import fluxparity_settings as settings

EXCITED = 0
GROUND = 1

PAULI_KINDS = ('x', 'y', 'z', 'plus', 'minus', 'identity')
PARITY_EVEN = 'even'
PARITY_ODD = 'odd'
PARITY_NONE = 'none'

_PAULI_MATRICES = {
    'x': [[0, 1], [1, 0]],
    'y': [[0, -1j], [1j, 0]],
    'z': [[1, 0], [0, -1]],
    'plus': [[0, 1], [0, 0]],
    'minus': [[0, 0], [1, 0]],
    'identity': [[1, 0], [0, 1]],
}


@dataclass(frozen=True)
class HilbertSpace:
    factor_dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError('Invalid factor dimensions: %r' % (self.factor_dims,))
        object.__setattr__(self, 'factor_dims', dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    @classmethod
    def qubit(cls) -> 'HilbertSpace':
        return cls((2,))

    @classmethod
    def resonator(cls, n_max: int) -> 'HilbertSpace':
        return cls((n_max + 1,))

    @classmethod
    def composite(cls, n_max: int) -> 'HilbertSpace':
        return cls((2, n_max + 1))

    def __mul__(self, other: 'HilbertSpace') -> 'HilbertSpace':
        return HilbertSpace(self.factor_dims + other.factor_dims)


@dataclass(frozen=True, eq=False)
class LabeledOperator:
    space: HilbertSpace
    matrix: np.ndarray
    name: str = ''

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError('Operator %r is not square: shape %r' % (self.name, matrix.shape))
        if matrix.shape[0] != self.space.dim:
            raise ValueError(
                'Operator %r has dimension %d but its space %r has dimension %d'
                % (self.name, matrix.shape[0], self.space.factor_dims, self.space.dim)
            )
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def dim(self) -> int:
        return self.space.dim

    def dag(self) -> 'LabeledOperator':
        return LabeledOperator(self.space, self.matrix.conj().T, self.name + '†')

    def is_hermitian(self, tol: float = None) -> bool:
        tol = settings.COMMUTATOR_TOLERANCE if tol is None else tol
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def is_close(self, other: 'LabeledOperator', tol: float = None) -> bool:
        tol = settings.COMMUTATOR_TOLERANCE if tol is None else tol
        return self.space == other.space and bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)

    def expect(self, rho: np.ndarray) -> complex:
        return complex(np.trace(self.matrix @ rho))

    def _check_space(self, other: 'LabeledOperator'):
        if self.space != other.space:
            raise ValueError(
                'Operator spaces differ: %r vs %r' % (self.space.factor_dims, other.space.factor_dims)
            )

    def __add__(self, other: 'LabeledOperator') -> 'LabeledOperator':
        self._check_space(other)
        return LabeledOperator(self.space, self.matrix + other.matrix, '(%s + %s)' % (self.name, other.name))

    def __sub__(self, other: 'LabeledOperator') -> 'LabeledOperator':
        self._check_space(other)
        return LabeledOperator(self.space, self.matrix - other.matrix, '(%s - %s)' % (self.name, other.name))

    def __neg__(self) -> 'LabeledOperator':
        return LabeledOperator(self.space, -self.matrix, '-' + self.name)

    def __mul__(self, scalar) -> 'LabeledOperator':
        return LabeledOperator(self.space, self.matrix * scalar, '%s·%s' % (scalar, self.name))

    __rmul__ = __mul__

    def __matmul__(self, other: 'LabeledOperator') -> 'LabeledOperator':
        self._check_space(other)
        return LabeledOperator(self.space, self.matrix @ other.matrix, self.name + other.name)

    def __pow__(self, exponent: int) -> 'LabeledOperator':
        matrix = np.linalg.matrix_power(self.matrix, exponent)
        return LabeledOperator(self.space, matrix, '%s^%d' % (self.name, exponent))


def identity(space: HilbertSpace) -> LabeledOperator:
    return LabeledOperator(space, np.eye(space.dim), 'I%d' % space.dim)


def zero(space: HilbertSpace) -> LabeledOperator:
    return LabeledOperator(space, np.zeros((space.dim, space.dim)), '0')


def pauli(kind: str) -> LabeledOperator:
    if kind not in _PAULI_MATRICES:
        raise ValueError('Unknown Pauli operator %r, expected one of %s' % (kind, ', '.join(PAULI_KINDS)))
    return LabeledOperator(HilbertSpace.qubit(), np.array(_PAULI_MATRICES[kind]), 'σ_%s' % kind)


def boson_ops(n_max: int) -> Tuple[LabeledOperator, LabeledOperator, LabeledOperator]:
    """
    :param n_max: highest retained Fock level
    :return: (annihilation, creation, number) on the (n_max + 1)-level space
    """
    if n_max < 1:
        raise ValueError('n_max must be at least 1, got %r' % n_max)

    space = HilbertSpace.resonator(n_max)
    annihilate = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)
    a = LabeledOperator(space, annihilate, 'a')
    a_dag = LabeledOperator(space, annihilate.T, 'a†')
    number = LabeledOperator(space, np.diag(np.arange(n_max + 1, dtype=float)), 'n')
    return a, a_dag, number


def tensor(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    """
    Kronecker product in fixed (qubit ⊗ resonator) order.
    """
    return LabeledOperator(a.space * b.space, np.kron(a.matrix, b.matrix), '%s⊗%s' % (a.name, b.name))


def tensor_all(*operators: LabeledOperator) -> LabeledOperator:
    return reduce(tensor, operators)


def embed_qubit(op: LabeledOperator, n_max: int) -> LabeledOperator:
    return tensor(op, identity(HilbertSpace.resonator(n_max)))


def embed_resonator(op: LabeledOperator) -> LabeledOperator:
    return tensor(identity(HilbertSpace.qubit()), op)


def parity_ops(n_max: int) -> Tuple[LabeledOperator, LabeledOperator, LabeledOperator]:
    """
    :return: (Π_q = -σ_z, Π_r = e^{iπn}, Π_qr = Π_q ⊗ Π_r)
    """
    if n_max < 1:
        raise ValueError('n_max must be at least 1, got %r' % n_max)

    parity_q = LabeledOperator(HilbertSpace.qubit(), -pauli('z').matrix, 'Π_q')
    # e^{iπn} is exactly (-1)^n; built from integers to keep it real
    signs = (-1.0) ** np.arange(n_max + 1)
    parity_r = LabeledOperator(HilbertSpace.resonator(n_max), np.diag(signs), 'Π_r')
    parity_qr = tensor(parity_q, parity_r)
    return parity_q, parity_r, LabeledOperator(parity_qr.space, parity_qr.matrix, 'Π_qr')


def commutator(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    return a @ b - b @ a


def anticommutator(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    return a @ b + b @ a


def parity_classify(op: LabeledOperator, parity: LabeledOperator, tol: float = None) -> str:
    """
    Classify `op` against a parity operator: even if it commutes with the
    parity, odd if it anticommutes, none otherwise.

    `tol` is relative to max|op|·max|parity|, so drives given in rad/s are
    classified the same way as their unit-normalised counterparts.
    """
    tol = settings.COMMUTATOR_TOLERANCE if tol is None else tol
    if op.dim != parity.dim:
        raise ValueError('Operator and parity dimensions differ: %d vs %d' % (op.dim, parity.dim))

    op_matrix, parity_matrix = op.matrix, parity.matrix
    scale = float(np.max(np.abs(op_matrix)) * np.max(np.abs(parity_matrix)))
    if scale == 0.0:
        return PARITY_EVEN
    if np.max(np.abs(parity_matrix @ op_matrix - op_matrix @ parity_matrix)) <= tol * scale:
        return PARITY_EVEN
    if np.max(np.abs(parity_matrix @ op_matrix + op_matrix @ parity_matrix)) <= tol * scale:
        return PARITY_ODD
    return PARITY_NONE


def parity_sign(classification: str) -> int:
    """
    +1 for even, -1 for odd, 0 when the operator has no definite parity.
    """
    return {PARITY_EVEN: 1, PARITY_ODD: -1}.get(classification, 0)


def basis_state(space: HilbertSpace, *indices: int) -> np.ndarray:
    """
    Ket for the product basis state with the given per-factor indices,
    e.g. basis_state(HilbertSpace.composite(4), EXCITED, 2) is |e, 2⟩.
    """
    if len(indices) != len(space.factor_dims):
        raise ValueError('Expected %d indices, got %d' % (len(space.factor_dims), len(indices)))
    flat = int(np.ravel_multi_index(indices, space.factor_dims))
    ket = np.zeros(space.dim, dtype=np.complex128)
    ket[flat] = 1.0
    return ket


def state_parity(parity: LabeledOperator, ket: np.ndarray) -> float:
    """
    ⟨ψ|Π|ψ⟩ for a normalized ket; ±1 for parity eigenstates.
    """
    return float(np.real(np.vdot(ket, parity.matrix @ ket)))


def density_matrix(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, ket.conj())


def excited_projector(space: HilbertSpace) -> LabeledOperator:
    """
    |e⟩⟨e| on the qubit factor, identity elsewhere.
    """
    projector = LabeledOperator(HilbertSpace.qubit(), np.diag([1.0, 0.0]), '|e⟩⟨e|')
    if space.factor_dims == (2,):
        return projector
    return tensor(projector, identity(HilbertSpace(space.factor_dims[1:])))
