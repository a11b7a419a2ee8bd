"""
Four-stage estimation protocols (prepare, encode, read out, estimate) on a
single qudit, with the precision obtained from error propagation.

Dicke-like protocol: ``|i>`` rotated by ``exp(-i theta Jx)``, read out with
``Jz^2``.

GHZ-like protocol: ``(|0> + |d-1>)/sqrt2`` picks up ``exp(+i theta P)``, the
``|d-1>`` component is moved back to ``|1>`` by a pi pulse and a pi/2 pulse
on ``(0, 1)`` turns the relative phase into a population, read out with ``P``.

All moments are exact (no shot sampling).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .exceptions import InvariantViolation, LevelIndexError
from .pulses import (
    MIXING_PULSE,
    apply_sequence,
    compile_preparation,
    givens_unitary,
    recombination_pulse,
)
from .qfi import cramer_rao, qfi_pure
from .qudit import _check_dim, _spin_arrays, basis_state

__all__ = [
    "ThetaGrid",
    "ProtocolSpec",
    "ProtocolResult",
    "GhzClosedForm",
    "error_propagation",
    "default_dicke_index",
    "run_dicke_protocol",
    "run_ghz_protocol",
    "run_protocol",
    "ghz_closed_form",
    "jz_view",
    "format_number",
    "ghz_readout_unitary",
    "worker_count",
    "CSV_COLUMNS",
]

SLOPE_TOL = 1e-12
DEFAULT_FD_STEP = 1e-5
CSV_COLUMNS = ("theta", "expectation", "variance", "d_expectation", "precision_sq", "qfi", "crb")


def format_number(x: float) -> str:
    """17 significant digits; infinities as the literal ``inf``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


@dataclass(frozen=True)
class ThetaGrid:
    """Inclusive uniform grid of encoded phases (radians)."""

    start: float = 0.0
    stop: float = math.pi
    count: int = 721

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.count}")
        if not self.stop > self.start:
            raise ValueError("grid must be strictly increasing (stop > start)")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "count": self.count}


@dataclass(frozen=True)
class ProtocolSpec:
    kind: str  # "dicke" or "ghz"
    dim: int
    index: int | None = None
    derivative_mode: str = "analytic"  # or "finite_difference"
    h: float = DEFAULT_FD_STEP

    def __post_init__(self):
        object.__setattr__(self, "dim", _check_dim(self.dim))
        if self.kind not in ("dicke", "ghz"):
            raise ValueError(f"unknown protocol kind {self.kind!r}")
        if self.kind == "dicke":
            i = default_dicke_index(self.dim) if self.index is None else self.index
            if not 0 <= i < self.dim:
                raise LevelIndexError(f"Dicke index {i} out of range for d={self.dim}")
            object.__setattr__(self, "index", int(i))
        if self.derivative_mode not in ("analytic", "finite_difference"):
            raise ValueError(f"unknown derivative mode {self.derivative_mode!r}")
        if self.derivative_mode == "finite_difference" and not self.h > 0:
            raise ValueError("finite-difference step must be positive")


@dataclass(frozen=True)
class ProtocolResult:
    spec: ProtocolSpec
    grid: ThetaGrid
    theta: np.ndarray
    expectation: np.ndarray
    variance: np.ndarray
    d_expectation: np.ndarray
    precision_sq: np.ndarray
    qfi: float
    crb: float

    def rows(self):
        for k in range(len(self.theta)):
            yield (self.theta[k], self.expectation[k], self.variance[k],
                   self.d_expectation[k], self.precision_sq[k], self.qfi, self.crb)

    def check_invariants(self) -> None:
        if np.any(self.variance < -1e-12):
            raise InvariantViolation("negative variance in protocol result")
        finite = np.isfinite(self.precision_sq)
        if np.any(self.precision_sq[finite] < self.crb - 1e-8):
            k = np.flatnonzero(finite & (self.precision_sq < self.crb - 1e-8))[0]
            raise InvariantViolation(
                f"precision {self.precision_sq[k]!r} beats the Cramer-Rao bound {self.crb!r} "
                f"at theta={self.theta[k]!r}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows():
            w.writerow([format_number(float(x)) for x in row])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "kind": self.spec.kind,
            "d": self.spec.dim,
            "i": self.spec.index,
            "grid": self.grid.to_dict(),
            "derivative_mode": self.spec.derivative_mode,
        }

    def to_json(self) -> str:
        doc = self.metadata()
        doc["columns"] = list(CSV_COLUMNS)
        doc["rows"] = [[format_number(float(x)) for x in row] for row in self.rows()]
        return json.dumps(doc, indent=2) + "\n"


def error_propagation(variance: float, d_expectation: float) -> float:
    """``Var(A) / |d<A>/dtheta|^2``; diverges (``inf``) where the slope vanishes."""
    if variance < -1e-12:
        raise ValueError(f"negative variance {variance!r}")
    if abs(d_expectation) <= SLOPE_TOL:
        return math.inf
    return max(variance, 0.0) / d_expectation ** 2


def default_dicke_index(d: int) -> int:
    """Middle level: ``(d-1)/2`` for odd ``d``, ``d/2 - 1`` for even ``d``."""
    return (d - 1) // 2


# --------------------------------------------------------------------------
# pipeline


class _Pipeline(NamedTuple):
    # psi(theta) = post @ exp(sign i theta G) @ probe ; readout B
    probe: np.ndarray
    gen_w: np.ndarray
    gen_v: np.ndarray
    sign: int
    post: np.ndarray
    readout: np.ndarray
    pulled_back_slope: np.ndarray  # sign * i [post^dag B post, G]


def _build_pipeline(probe, G, sign, post, B) -> _Pipeline:
    w, v = np.linalg.eigh(G)
    Bp = post.conj().T @ B @ post
    slope_op = sign * 1j * (Bp @ G - G @ Bp)
    return _Pipeline(probe, w, v, sign, post, B, slope_op)


def _encoded(p: _Pipeline, theta: float) -> np.ndarray:
    v = p.gen_v
    return v @ (np.exp(p.sign * 1j * theta * p.gen_w) * (v.conj().T @ p.probe))


def _moments(p: _Pipeline, theta: float) -> tuple[float, float]:
    psi = p.post @ _encoded(p, theta)
    b_psi = p.readout @ psi
    mean = np.vdot(psi, b_psi).real
    var = np.vdot(b_psi, b_psi).real - mean * mean
    return mean, max(var, 0.0)


def _point(p: _Pipeline, mode: str, h: float, theta: float) -> tuple[float, float, float, float]:
    mean, var = _moments(p, theta)
    if mode == "analytic":
        phi = _encoded(p, theta)
        slope = np.vdot(phi, p.pulled_back_slope @ phi).real
    else:
        slope = (_moments(p, theta + h)[0] - _moments(p, theta - h)[0]) / (2 * h)
    return mean, var, slope, error_propagation(var, slope)


def worker_count() -> int:
    """Worker threads for grid evaluation (``QUDIT_METROLOGY_WORKERS``, default: CPU count)."""
    raw = os.environ.get("QUDIT_METROLOGY_WORKERS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def _evaluate(p: _Pipeline, spec: ProtocolSpec, grid: ThetaGrid, qfi: float,
              m: int, workers: int | None) -> ProtocolResult:
    thetas = grid.values
    task: Callable = lambda th: _point(p, spec.derivative_mode, spec.h, float(th))
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(task, thetas))
    else:
        points = [task(th) for th in thetas]
    arr = np.array(points, dtype=float).reshape(len(thetas), 4)
    result = ProtocolResult(
        spec=spec, grid=grid, theta=thetas,
        expectation=arr[:, 0], variance=arr[:, 1],
        d_expectation=arr[:, 2], precision_sq=arr[:, 3],
        qfi=qfi, crb=cramer_rao(qfi, m),
    )
    result.check_invariants()
    return result


def run_dicke_protocol(d: int, i: int | None = None, grid: ThetaGrid | None = None,
                       derivative_mode: str = "analytic", h: float = DEFAULT_FD_STEP,
                       m: int = 1, workers: int | None = None) -> ProtocolResult:
    """Rotate the Dicke-like probe ``|i>`` about x and read out ``Jz^2``.

    The slope in analytic mode is ``<-i [Jz^2, Jx]>`` on the rotated state.
    ``qfi``/``crb`` refer to the probe under ``Jx`` (``m`` repetitions).
    """
    spec = ProtocolSpec("dicke", d, i, derivative_mode, h)
    grid = grid or ThetaGrid()
    jx, _, jz = _spin_arrays(spec.dim)
    probe = apply_sequence(basis_state(spec.dim, 0), compile_preparation(spec.dim, spec.index))
    p = _build_pipeline(probe.amplitudes, jx, -1, np.eye(spec.dim, dtype=complex), jz @ jz)
    return _evaluate(p, spec, grid, qfi_pure(probe, jx), m, workers)


def ghz_readout_unitary(d: int) -> np.ndarray:
    """Recombination (``|d-1> -> |1>``, skipped for ``d = 2``) followed by the pi/2 mixing pulse."""
    d = _check_dim(d)
    U = givens_unitary(d, MIXING_PULSE)
    if d > 2:
        U = U @ givens_unitary(d, recombination_pulse(d))
    return U


def run_ghz_protocol(d: int, grid: ThetaGrid | None = None,
                     derivative_mode: str = "analytic", h: float = DEFAULT_FD_STEP,
                     m: int = 1, workers: int | None = None) -> ProtocolResult:
    """Encode ``exp(+i theta P)`` on the compiled GHZ-like probe and read out ``P``."""
    spec = ProtocolSpec("ghz", d, None, derivative_mode, h)
    grid = grid or ThetaGrid()
    d = spec.dim
    P = np.diag(np.arange(d, dtype=float)).astype(complex)
    probe = apply_sequence(basis_state(d, 0), compile_preparation(d, "ghz"))
    p = _build_pipeline(probe.amplitudes, P, +1, ghz_readout_unitary(d), P)
    return _evaluate(p, spec, grid, qfi_pure(probe, P), m, workers)


def run_protocol(spec: ProtocolSpec, grid: ThetaGrid | None = None, m: int = 1,
                 workers: int | None = None) -> ProtocolResult:
    if spec.kind == "dicke":
        return run_dicke_protocol(spec.dim, spec.index, grid, spec.derivative_mode, spec.h, m, workers)
    return run_ghz_protocol(spec.dim, grid, spec.derivative_mode, spec.h, m, workers)


class GhzClosedForm(NamedTuple):
    expectation: float
    variance: float
    precision_sq: float
    at_node: bool


def ghz_closed_form(d: int, theta: float) -> GhzClosedForm:
    """Analytic moments of the GHZ-like interferometer.

    ``<P> = sin^2(x/2)``, ``Var(P) = sin^2(x)/4`` with ``x = (d-1) theta``.
    Away from the nodes ``x = n pi`` the precision is ``1/(d-1)^2``, which is
    also its limit at the nodes, where the propagated value itself diverges.
    """
    d = _check_dim(d)
    x = (d - 1) * theta
    mean = math.sin(x / 2) ** 2
    var = math.sin(x) ** 2 / 4
    slope = (d - 1) / 2 * math.sin(x)
    at_node = abs(slope) <= SLOPE_TOL
    return GhzClosedForm(mean, var, math.inf if at_node else 1.0 / (d - 1) ** 2, at_node)


def jz_view(result: ProtocolResult, d: int | None = None) -> np.ndarray:
    """``<Jz> = <P> - (d-1)/2`` for a GHZ protocol run."""
    d = result.spec.dim if d is None else d
    return result.expectation - (d - 1) / 2

