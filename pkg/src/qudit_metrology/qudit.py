"""
Single-qudit states, operators and the generalized Bloch representation.

Basis convention: level ``i`` is the spin state ``|J, -J + i>`` with
``J = (d - 1) / 2``, so ``Jz = diag(-J, ..., J)`` and the phase generator
``P = diag(0, ..., d - 1) = Jz + J``.

All value types are frozen dataclasses holding read-only numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InvalidDimensionError,
    LevelIndexError,
    NonHermitianError,
    NotAStateError,
)

__all__ = [
    "MAX_DIM",
    "PureState",
    "DensityMatrix",
    "HermitianObservable",
    "gell_mann_basis",
    "bloch_vector",
    "density_from_bloch",
    "spin_operators",
    "phase_generator",
    "basis_state",
    "ghz_like",
    "spin_coherent",
    "random_pure_state",
    "random_density_matrix",
    "random_hermitian",
    "to_density",
    "evolve",
    "expectation",
    "variance",
]

MAX_DIM = 64

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10


def _check_dim(d: int) -> int:
    if int(d) != d:
        raise InvalidDimensionError(f"dimension must be an integer, got {d!r}")
    d = int(d)
    if d < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {d}")
    if d > MAX_DIM:
        raise InvalidDimensionError(f"dimension {d} exceeds cap {MAX_DIM}")
    return d


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PureState:
    """Unit-norm amplitude vector of a d-level system."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1:
            raise NotAStateError("amplitudes must be a 1-d vector")
        _check_dim(amp.shape[0])
        norm = np.vdot(amp, amp).real
        if abs(norm - 1.0) > NORM_TOL:
            raise NotAStateError(f"state norm^2 is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amp))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def normalized(cls, vec) -> "PureState":
        vec = np.asarray(vec, dtype=complex)
        return cls(vec / np.linalg.norm(vec))

    def fidelity(self, other: "PureState") -> float:
        """``|<self|other>|^2``."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dims {self.dim} and {other.dim}")
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite d x d matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise NotAStateError("density matrix must be square")
        _check_dim(rho.shape[0])
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise NotAStateError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise NotAStateError(f"trace is {tr!r}, expected 1")
        lam_min = np.linalg.eigvalsh(rho)[0]
        if lam_min < -POSITIVITY_TOL:
            raise NotAStateError(f"negative eigenvalue {lam_min!r}")
        object.__setattr__(self, "matrix", _frozen(rho))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class HermitianObservable:
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NonHermitianError("observable must be square")
        _check_dim(a.shape[0])
        if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
            raise NonHermitianError("observable is not Hermitian")
        object.__setattr__(self, "matrix", _frozen(a))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        return np.asarray(self.matrix) @ _as_matrix(other)

    def __add__(self, other: "HermitianObservable") -> "HermitianObservable":
        return HermitianObservable(self.matrix + _as_matrix(other))

    def __mul__(self, scalar: float) -> "HermitianObservable":
        return HermitianObservable(self.matrix * float(scalar))

    __rmul__ = __mul__


State = Union[PureState, DensityMatrix]
Operator = Union[HermitianObservable, np.ndarray]


def _as_matrix(A) -> np.ndarray:
    if isinstance(A, HermitianObservable):
        return A.matrix
    return np.asarray(A, dtype=complex)


def _as_observable(A) -> HermitianObservable:
    return A if isinstance(A, HermitianObservable) else HermitianObservable(A)


# --------------------------------------------------------------------------
# operator bases


@lru_cache(maxsize=None)
def _gell_mann_array(d: int) -> np.ndarray:
    mats = []
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1.0
        mats.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(np.sqrt(2.0 / (l * (l + 1))) * diag).astype(complex))
    arr = np.array(mats)
    arr.flags.writeable = False
    return arr


def gell_mann_basis(d: int) -> list[HermitianObservable]:
    """Generalized Gell-Mann matrices, normalized to ``Tr(E_a E_b) = 2 delta_ab``.

    Ordering: symmetric ``(j<k)``, then antisymmetric ``(j<k)``, then the
    ``d - 1`` diagonal matrices. For ``d = 2`` this is ``(X, Y, Z)``.
    """
    d = _check_dim(d)
    return [HermitianObservable(m) for m in _gell_mann_array(d)]


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """Real coefficients ``omega_a = Tr(rho E_a)``."""
    E = _gell_mann_array(rho.dim)
    return np.einsum("ij,aji->a", rho.matrix, E).real


def density_from_bloch(d: int, omega) -> DensityMatrix:
    """Inverse of :func:`bloch_vector`: ``rho = I/d + omega . E / 2``.

    Raises :class:`NotAStateError` if the result is not positive.
    """
    d = _check_dim(d)
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (d * d - 1,):
        raise DimensionMismatchError(
            f"Bloch vector for d={d} needs length {d * d - 1}, got {omega.shape}")
    rho = np.eye(d, dtype=complex) / d + 0.5 * np.einsum("a,aij->ij", omega, _gell_mann_array(d))
    return DensityMatrix(rho)


@lru_cache(maxsize=None)
def _spin_arrays(d: int):
    J = (d - 1) / 2
    m = -J + np.arange(d - 1)
    # J+ |i> = sqrt(J(J+1) - m(m+1)) |i+1>
    jp = np.diag(np.sqrt(J * (J + 1) - m * (m + 1)), -1).astype(complex)
    jx = (jp + jp.conj().T) / 2
    jy = (jp - jp.conj().T) / 2j
    jz = np.diag(-J + np.arange(d)).astype(complex)
    return jx, jy, jz


def spin_operators(d: int) -> tuple[HermitianObservable, HermitianObservable, HermitianObservable]:
    """Spin-``(d-1)/2`` matrices ``(Jx, Jy, Jz)`` in the level basis."""
    d = _check_dim(d)
    return tuple(HermitianObservable(a) for a in _spin_arrays(d))


def phase_generator(d: int) -> HermitianObservable:
    """``P = diag(0, 1, ..., d-1)``."""
    d = _check_dim(d)
    return HermitianObservable(np.diag(np.arange(d, dtype=float)))


# --------------------------------------------------------------------------
# states


def basis_state(d: int, i: int) -> PureState:
    d = _check_dim(d)
    if not 0 <= i < d:
        raise LevelIndexError(f"level {i} out of range for d={d}")
    amp = np.zeros(d, dtype=complex)
    amp[i] = 1.0
    return PureState(amp)


def ghz_like(d: int) -> PureState:
    """``(|0> + |d-1>) / sqrt(2)``."""
    d = _check_dim(d)
    amp = np.zeros(d, dtype=complex)
    amp[0] = amp[d - 1] = 1 / np.sqrt(2)
    return PureState(amp)


def spin_coherent(d: int, polar: float, azimuth: float) -> PureState:
    """``exp(-i azimuth Jz) exp(-i polar Jy) |0>``; ``|0>`` is the lowest-weight state."""
    d = _check_dim(d)
    _, jy, jz = _spin_arrays(d)
    psi = _expi(jy, -polar) @ basis_state(d, 0).amplitudes
    psi = np.exp(-1j * azimuth * np.diag(jz).real) * psi
    return PureState.normalized(psi)


def random_pure_state(d: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state."""
    d = _check_dim(d)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState.normalized(v)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random mixed state ``G G^dag / Tr`` from a d x rank Ginibre matrix."""
    d = _check_dim(d)
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)


def random_hermitian(d: int, rng: np.random.Generator) -> HermitianObservable:
    d = _check_dim(d)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return HermitianObservable((a + a.conj().T) / 2)


def to_density(state: State) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    psi = state.amplitudes
    rho = np.outer(psi, psi.conj())
    return DensityMatrix((rho + rho.conj().T) / 2)


# --------------------------------------------------------------------------
# dynamics and moments


def _expi(G: np.ndarray, theta: float) -> np.ndarray:
    """``exp(i theta G)`` for Hermitian ``G`` by eigendecomposition."""
    w, v = np.linalg.eigh(G)
    return (v * np.exp(1j * theta * w)) @ v.conj().T


def _check_same_dim(state: State, A) -> None:
    n = _as_matrix(A).shape[0]
    if state.dim != n:
        raise DimensionMismatchError(f"state dim {state.dim} vs operator dim {n}")


def evolve(state: State, G: Operator, theta: float, sign: int = +1) -> State:
    """Apply ``U = exp(sign * i * theta * G)``.

    Pure states are multiplied, density matrices conjugated (``U rho U^dag``).
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    G = _as_observable(G)
    _check_same_dim(state, G)
    U = _expi(G.matrix, sign * theta)
    if isinstance(state, PureState):
        return PureState.normalized(U @ state.amplitudes)
    rho = U @ state.matrix @ U.conj().T
    return DensityMatrix((rho + rho.conj().T) / 2)


def expectation(state: State, A: Operator) -> float:
    _check_same_dim(state, A)
    A = _as_matrix(A)
    if isinstance(state, PureState):
        psi = state.amplitudes
        val = np.vdot(psi, A @ psi)
    else:
        val = np.trace(state.matrix @ A)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NonHermitianError(f"expectation has imaginary part {val.imag!r}")
    return float(val.real)


def variance(state: State, A: Operator) -> float:
    """``<A^2> - <A>^2``; tiny negative round-off is clipped to zero."""
    A = _as_matrix(A)
    mean = expectation(state, A)
    var = expectation(state, A @ A) - mean * mean
    if var < -1e-12 * max(1.0, mean * mean):
        raise NotAStateError(f"negative variance {var!r}")
    return max(var, 0.0)
