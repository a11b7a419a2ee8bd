"""
Two-level (Givens) rotations and a compiler for probe preparation.

A pulse on levels ``(j, k)`` is

    U = exp[-i (angle/2) (cos(phi) X_jk + sin(phi) Y_jk)]

with ``X_jk = |j><k| + |k><j|`` and ``Y_jk = -i|j><k| + i|k><j|``. On the
pair it acts as ``cos(a/2) I - i sin(a/2) (cos(phi) X + sin(phi) Y)``, so a
pi pulse sends ``|j> -> -i e^{i phi} |k>`` and ``|k> -> -i e^{-i phi} |j>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatchError, LevelIndexError
from .qudit import PureState, _check_dim

__all__ = [
    "GivensPulse",
    "PulseSequence",
    "givens_unitary",
    "compile_preparation",
    "apply_sequence",
    "transfer_pulse",
    "MIXING_PULSE",
    "recombination_pulse",
]


@dataclass(frozen=True)
class GivensPulse:
    level_j: int
    level_k: int
    angle: float
    axis_phase: float = 0.0

    def __post_init__(self):
        if not 0 <= self.level_j < self.level_k:
            raise LevelIndexError(
                f"pulse levels must satisfy 0 <= j < k, got ({self.level_j}, {self.level_k})")
        if not (math.isfinite(self.angle) and math.isfinite(self.axis_phase)):
            raise ValueError("pulse angle and phase must be finite")

    def inverse(self) -> "GivensPulse":
        return GivensPulse(self.level_j, self.level_k, -self.angle, self.axis_phase)


@dataclass(frozen=True)
class PulseSequence:
    dim: int
    pulses: tuple[GivensPulse, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "dim", _check_dim(self.dim))
        object.__setattr__(self, "pulses", tuple(self.pulses))
        for p in self.pulses:
            if p.level_k >= self.dim:
                raise LevelIndexError(f"pulse {p} exceeds dimension {self.dim}")

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    def unitary(self) -> np.ndarray:
        U = np.eye(self.dim, dtype=complex)
        for p in self.pulses:
            U = givens_unitary(self.dim, p) @ U
        return U


def givens_unitary(d: int, pulse: GivensPulse) -> np.ndarray:
    d = _check_dim(d)
    j, k = pulse.level_j, pulse.level_k
    if k >= d:
        raise LevelIndexError(f"pulse levels ({j}, {k}) out of range for d={d}")
    c = math.cos(pulse.angle / 2)
    s = math.sin(pulse.angle / 2)
    U = np.eye(d, dtype=complex)
    U[j, j] = c
    U[k, k] = c
    U[k, j] = -1j * s * np.exp(1j * pulse.axis_phase)
    U[j, k] = -1j * s * np.exp(-1j * pulse.axis_phase)
    return U


def transfer_pulse(j: int, k: int, angle: float, phase: float = 0.0) -> GivensPulse:
    """Pulse on ``(j, k)`` whose ``|j> -> |k>`` amplitude carries ``e^{i phase}``.

    The axis phase absorbs the ``-i`` of the rotation so that, e.g., a pi
    pulse moves population from ``j`` to ``k`` with no extra phase.
    """
    return GivensPulse(j, k, angle, (phase + math.pi / 2) % (2 * math.pi))


# pi/2 pulse on (0, 1) closing the GHZ-like interferometer:
# (|0> + e^{ix}|1>)/sqrt2 -> ((1 + e^{ix})|0> - (1 - e^{ix})|1>)/2
MIXING_PULSE = GivensPulse(0, 1, math.pi / 2, 3 * math.pi / 2)


def recombination_pulse(d: int) -> GivensPulse:
    """pi pulse mapping ``|d-1> -> |1>`` with unit phase (``d >= 3``)."""
    d = _check_dim(d)
    if d < 3:
        raise LevelIndexError("recombination needs d >= 3")
    return GivensPulse(1, d - 1, math.pi, 3 * math.pi / 2)


def compile_preparation(d: int, target) -> PulseSequence:
    """Pulse chain preparing ``target`` from ``|0>``.

    ``target`` is ``"ghz"`` or ``("dicke", i)`` (an ``int`` is read as a
    Dicke index). Dicke states use a ladder of pi pulses; the GHZ-like
    state a pi/2 pulse on (0, 1) followed by pi pulses walking ``|1>`` up
    to ``|d-1>``. Phases are chosen so the output equals the target exactly.
    """
    d = _check_dim(d)
    if isinstance(target, str) and target == "ghz":
        pulses = [transfer_pulse(0, 1, math.pi / 2)]
        pulses += [transfer_pulse(m, m + 1, math.pi) for m in range(1, d - 1)]
        return PulseSequence(d, tuple(pulses))
    if isinstance(target, tuple) and len(target) == 2 and target[0] == "dicke":
        i = target[1]
    elif isinstance(target, (int, np.integer)) and not isinstance(target, bool):
        i = int(target)
    else:
        raise ValueError(f"unknown preparation target {target!r}")
    if not 0 <= i < d:
        raise LevelIndexError(f"Dicke index {i} unreachable for d={d}")
    return PulseSequence(d, tuple(transfer_pulse(m, m + 1, math.pi) for m in range(i)))


def apply_sequence(state: PureState, seq: PulseSequence) -> PureState:
    if state.dim != seq.dim:
        raise DimensionMismatchError(f"state dim {state.dim} vs sequence dim {seq.dim}")
    psi = state.amplitudes
    for p in seq:
        psi = givens_unitary(seq.dim, p) @ psi
    return PureState.normalized(psi)
