"""
Permutationally symmetric N-qubit states on the full ``2^N`` space and the
check that their collective-spin QFI equals that of an ``(N+1)``-level qudit.

Qubits are big-endian (qubit 0 is the leftmost tensor factor) and use the
standard Pauli matrices, so ``|0>`` is spin up. Qudit level ``i`` (spin
projection ``-N/2 + i``) therefore maps to the Dicke state with ``N - i``
excitations; with this identification the embedding intertwines
``n . J`` on both sides for every direction ``n``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exceptions import DimensionMismatchError, InvalidDimensionError, LevelIndexError, NotAStateError
from .qfi import qfi_pure
from .qudit import PureState, _spin_arrays

__all__ = [
    "MAX_QUBITS",
    "SymmetricState",
    "CollectiveOperator",
    "EquivalenceCase",
    "EquivalenceReport",
    "dicke_multiqubit",
    "ghz_multiqubit",
    "embed_qudit",
    "embedding_matrix",
    "collective_op",
    "collective_spin_arrays",
    "qfi_equivalence_check",
]

MAX_QUBITS = 12

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


def _check_n(n_qubits: int) -> int:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidDimensionError(f"number of qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    return int(n_qubits)


def _swap_adjacent(amp: np.ndarray, n: int, q: int) -> np.ndarray:
    t = amp.reshape((2,) * n)
    return np.swapaxes(t, q, q + 1).reshape(-1)


@dataclass(frozen=True)
class SymmetricState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n_qubits)
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.shape != (2 ** n,):
            raise DimensionMismatchError(f"need {2 ** n} amplitudes for {n} qubits")
        if abs(np.vdot(amp, amp).real - 1.0) > 1e-12:
            raise NotAStateError("symmetric state must have unit norm")
        for q in range(n - 1):
            if np.max(np.abs(_swap_adjacent(amp, n, q) - amp)) > 1e-10:
                raise NotAStateError(f"state is not symmetric under swapping qubits {q}, {q + 1}")
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits


@dataclass(frozen=True)
class CollectiveOperator:
    """``sum_n (n . sigma^(n)) / 2`` on ``2^N`` dimensions."""

    n_qubits: int
    direction: tuple[float, float, float]
    matrix: np.ndarray


@lru_cache(maxsize=None)
def collective_spin_arrays(n_qubits: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(Jx, Jy, Jz)`` as dense ``2^N x 2^N`` Kronecker sums."""
    n = _check_n(n_qubits)
    out = []
    for axis in "xyz":
        # diagonal/sparse structure is ignored; N <= 12 keeps this small enough
        total = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for q in range(n):
            term = np.kron(np.eye(2 ** q), np.kron(_PAULI[axis], np.eye(2 ** (n - q - 1))))
            total += term
        total /= 2
        total.flags.writeable = False
        out.append(total)
    return tuple(out)


def collective_op(n_qubits: int, direction) -> CollectiveOperator:
    """Collective spin along ``"x"``, ``"y"``, ``"z"`` or a 3-vector (normalized)."""
    if isinstance(direction, str):
        n_vec = np.array(_AXES[direction.lower()])
    else:
        n_vec = np.asarray(direction, dtype=float)
        n_vec = n_vec / np.linalg.norm(n_vec)
    jx, jy, jz = collective_spin_arrays(n_qubits)
    mat = n_vec[0] * jx + n_vec[1] * jy + n_vec[2] * jz
    return CollectiveOperator(int(n_qubits), tuple(float(x) for x in n_vec), mat)


def dicke_multiqubit(n_qubits: int, k: int) -> SymmetricState:
    """Uniform superposition of all bit strings with ``k`` ones."""
    n = _check_n(n_qubits)
    if not 0 <= k <= n:
        raise LevelIndexError(f"excitation number {k} out of range for N={n}")
    amp = np.zeros(2 ** n, dtype=complex)
    norm = 1 / math.sqrt(math.comb(n, k))
    for ones in itertools.combinations(range(n), k):
        idx = sum(1 << (n - 1 - q) for q in ones)
        amp[idx] = norm
    return SymmetricState(n, amp)


def ghz_multiqubit(n_qubits: int) -> SymmetricState:
    n = _check_n(n_qubits)
    amp = np.zeros(2 ** n, dtype=complex)
    amp[0] = amp[-1] = 1 / math.sqrt(2)
    return SymmetricState(n, amp)


@lru_cache(maxsize=None)
def embedding_matrix(d: int) -> np.ndarray:
    """Isometry ``2^(d-1) x d`` with column ``i`` the Dicke state of ``d-1-i`` excitations."""
    n = _check_n(d - 1)
    V = np.column_stack([dicke_multiqubit(n, n - i).amplitudes for i in range(d)])
    V.flags.writeable = False
    return V


def embed_qudit(psi: PureState) -> SymmetricState:
    if psi.dim - 1 > MAX_QUBITS:
        raise InvalidDimensionError(f"qudit dimension {psi.dim} exceeds {MAX_QUBITS + 1}")
    amp = embedding_matrix(psi.dim) @ psi.amplitudes
    return SymmetricState(psi.dim - 1, amp / np.linalg.norm(amp))


@dataclass(frozen=True)
class EquivalenceCase:
    state_label: str
    direction: tuple[float, float, float]
    qudit_qfi: float
    multiqubit_qfi: float

    @property
    def residual(self) -> float:
        return abs(self.qudit_qfi - self.multiqubit_qfi)


@dataclass(frozen=True)
class EquivalenceReport:
    n_qubits: int
    cases: tuple[EquivalenceCase, ...]
    tol: float

    @property
    def max_residual(self) -> float:
        return float(max((c.residual for c in self.cases), default=0.0))

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "cases": [
                {
                    "state_label": c.state_label,
                    "direction": list(c.direction),
                    "qudit_qfi": float(c.qudit_qfi),
                    "multiqubit_qfi": float(c.multiqubit_qfi),
                    "residual": float(c.residual),
                }
                for c in self.cases
            ],
            "max_residual": self.max_residual,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def merge(self, other: "EquivalenceReport") -> "EquivalenceReport":
        if other.n_qubits != self.n_qubits:
            raise DimensionMismatchError("cannot merge reports for different N")
        return EquivalenceReport(self.n_qubits, self.cases + other.cases, min(self.tol, other.tol))


def qfi_equivalence_check(psi: PureState, directions: Sequence, tol: float = 1e-8,
                          label: str = "state") -> EquivalenceReport:
    """Compare ``qfi_pure`` on the qudit and on its symmetric N-qubit image per direction."""
    n = psi.dim - 1
    embedded = embed_qudit(psi)
    jq = _spin_arrays(psi.dim)
    cases = []
    for direction in directions:
        op = collective_op(n, direction)
        nvec = np.array(op.direction)
        a_qudit = nvec[0] * jq[0] + nvec[1] * jq[1] + nvec[2] * jq[2]
        cases.append(EquivalenceCase(
            label, op.direction,
            qfi_pure(psi, a_qudit),
            qfi_pure(embedded, op.matrix),
        ))
    return EquivalenceReport(n, tuple(cases), tol)
