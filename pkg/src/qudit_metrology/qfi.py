"""
Quantum Fisher information estimators and the resource measures built on it.

Four routes to the QFI of a unitary encoding ``exp(i theta A)``:

* :func:`qfi_sld`        ``Tr(rho L^2)`` with the symmetric logarithmic derivative
* :func:`qfi_spectral`   eigen-sum over pairs with ``lambda_i + lambda_j > 0``
* :func:`qfi_pure`       ``4 Var(A)`` (pure states only)
* :func:`qfi_pure_bloch` ``|d omega / d theta|^2`` in the Gell-Mann basis

Resource measures maximize over collective generators ``n . J`` with
``|n| = 1``; the classical (spin-coherent) maximum is ``d - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, NonHermitianError, NotAStateError
from .qudit import (
    DensityMatrix,
    HermitianObservable,
    _as_matrix,
    _gell_mann_array,
    _spin_arrays,
)

__all__ = [
    "EigenDecomposition",
    "GeneratorDirection",
    "QfiReport",
    "eigendecompose",
    "sld",
    "qfi_sld",
    "qfi_spectral",
    "qfi_pure",
    "qfi_pure_bloch",
    "qfi_matrix",
    "qfi_max_collective",
    "qfi_max_collective_search",
    "icosphere",
    "d_eff",
    "n_eff",
    "nonclassicality",
    "metrological_power",
    "cramer_rao",
    "qfi_report",
]

SUPPORT_TOL = 1e-12
CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class GeneratorDirection:
    """Unit 3-vector ``n`` selecting the collective generator ``n . J``."""

    n: tuple[float, float, float]

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        if n.shape != (3,):
            raise ValueError("direction must be a 3-vector")
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError(f"direction must have unit norm, got |n|={np.linalg.norm(n)!r}")
        object.__setattr__(self, "n", tuple(float(x) for x in n))

    @classmethod
    def from_vector(cls, v) -> "GeneratorDirection":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        # fix the overall sign: F(n) = F(-n)
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if nz.size and v[nz[0]] < 0:
            v = -v
        return cls(tuple(v))

    def operator(self, d: int) -> HermitianObservable:
        jx, jy, jz = _spin_arrays(d)
        nx, ny, nz = self.n
        return HermitianObservable(nx * jx + ny * jy + nz * jz)


@dataclass(frozen=True)
class QfiReport:
    f_q: float
    direction: GeneratorDirection
    d_eff: float
    nonclassicality: float
    metrological_power: float
    crb: float

    def to_dict(self) -> dict:
        return {
            "f_q": self.f_q,
            "direction": list(self.direction.n),
            "d_eff": self.d_eff,
            "nonclassicality": self.nonclassicality,
            "metrological_power": self.metrological_power,
            "crb": "inf" if math.isinf(self.crb) else self.crb,
        }


def _as_state_array(x) -> np.ndarray:
    """Amplitude vector (pure) or square matrix (mixed) behind ``x``."""
    if isinstance(x, DensityMatrix):
        return x.matrix
    amp = getattr(x, "amplitudes", x)
    return np.asarray(amp, dtype=complex)


def _density_array(rho) -> np.ndarray:
    a = _as_state_array(rho)
    if a.ndim == 1:
        return np.outer(a, a.conj())
    return a


def _pure_array(psi) -> np.ndarray:
    a = _as_state_array(psi)
    if a.ndim != 1:
        raise NotAStateError("expected a pure state vector")
    return a


def _hermitian(A, name: str = "operator") -> np.ndarray:
    A = _as_matrix(A)
    if np.max(np.abs(A - A.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(A))):
        raise NonHermitianError(f"{name} is not Hermitian")
    return A


def eigendecompose(rho) -> EigenDecomposition:
    """Ascending eigenpairs with eigenvalues in ``[-1e-10, 0)`` clamped to zero."""
    rho = _density_array(rho)
    lam, vec = np.linalg.eigh(rho)
    if lam[0] < -CLAMP_TOL:
        raise NotAStateError(f"negative eigenvalue {lam[0]!r}")
    lam = np.where(lam < 0, 0.0, lam)
    return EigenDecomposition(lam, vec)


def _pair_weights(lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = lam[:, None] + lam[None, :]
    support = s > SUPPORT_TOL
    return s, support


def sld(rho, drho) -> HermitianObservable:
    """Symmetric logarithmic derivative solving ``drho = {rho, L} / 2``.

    Built in the eigenbasis of ``rho``; components with
    ``lambda_i + lambda_j <= 1e-12`` are set to zero.
    """
    drho = _hermitian(drho, "drho")
    eig = eigendecompose(rho)
    if drho.shape != eig.eigenvectors.shape:
        raise DimensionMismatchError("rho and drho shapes differ")
    v = eig.eigenvectors
    d_eig = v.conj().T @ drho @ v
    s, support = _pair_weights(eig.eigenvalues)
    L = np.zeros_like(d_eig)
    L[support] = 2 * d_eig[support] / s[support]
    L = v @ L @ v.conj().T
    return HermitianObservable((L + L.conj().T) / 2)


def _unitary_drho(rho: np.ndarray, G: np.ndarray) -> np.ndarray:
    # d/dtheta of e^{-i theta G} rho e^{i theta G} at theta = 0
    return -1j * (G @ rho - rho @ G)


def qfi_sld(rho, G) -> float:
    rho_m = _density_array(rho)
    G = _hermitian(G, "generator")
    drho = _unitary_drho(rho_m, G)
    drho = (drho + drho.conj().T) / 2
    L = sld(rho_m, drho).matrix
    f = float(np.real(np.trace(rho_m @ L @ L)))
    if f < -1e-10:
        raise NotAStateError(f"negative QFI {f!r}")
    return max(f, 0.0)


def qfi_spectral(rho, A) -> float:
    A = _hermitian(A, "generator")
    eig = eigendecompose(rho)
    if A.shape != eig.eigenvectors.shape:
        raise DimensionMismatchError("state and generator shapes differ")
    lam, v = eig.eigenvalues, eig.eigenvectors
    a = v.conj().T @ A @ v
    s, support = _pair_weights(lam)
    diff2 = (lam[:, None] - lam[None, :]) ** 2
    w = np.zeros_like(s)
    w[support] = diff2[support] / s[support]
    return float(2 * np.sum(w * np.abs(a) ** 2))


def qfi_pure(psi, A) -> float:
    """``4 (<A^2> - <A>^2)`` for a pure state."""
    psi = _pure_array(psi)
    A = _as_matrix(A)
    if A.shape[0] != psi.shape[0]:
        raise DimensionMismatchError("state and generator dims differ")
    a_psi = A @ psi
    mean = np.vdot(psi, a_psi).real
    second = np.vdot(a_psi, a_psi).real
    return max(4.0 * (second - mean * mean), 0.0)


def qfi_pure_bloch(psi, G) -> float:
    """QFI of a pure state as the squared speed of its Bloch vector."""
    rho = _density_array(psi)
    G = _hermitian(G, "generator")
    drho = _unitary_drho(rho, G)
    E = _gell_mann_array(rho.shape[0])
    domega = np.einsum("ij,aji->a", drho, E).real
    return float(domega @ domega)


# --------------------------------------------------------------------------
# maximization over collective directions


def qfi_matrix(rho, ops) -> np.ndarray:
    """Real symmetric matrix ``F_ab`` with ``F(n . ops) = n^T F n``.

    For a pure state this is four times the symmetrized covariance matrix.
    """
    ops = [_as_matrix(o) for o in ops]
    state = _as_state_array(rho)
    if state.ndim == 1:
        psi = state
        vecs = [o @ psi for o in ops]
        means = np.array([np.vdot(psi, v).real for v in vecs])
        k = len(ops)
        C = np.empty((k, k))
        for a in range(k):
            for b in range(k):
                C[a, b] = np.vdot(vecs[a], vecs[b]).real - means[a] * means[b]
        return 4 * (C + C.T) / 2
    eig = eigendecompose(state)
    lam, v = eig.eigenvalues, eig.eigenvectors
    s, support = _pair_weights(lam)
    w = np.zeros_like(s)
    w[support] = (lam[:, None] - lam[None, :])[support] ** 2 / s[support]
    rot = [v.conj().T @ o @ v for o in ops]
    k = len(ops)
    F = np.empty((k, k))
    for a in range(k):
        for b in range(a, k):
            F[a, b] = F[b, a] = 2 * np.sum(w * np.real(rot[a] * rot[b].T))
    return F


def _top_direction(F: np.ndarray) -> tuple[float, GeneratorDirection]:
    w, v = np.linalg.eigh(F)
    return max(float(w[-1]), 0.0), GeneratorDirection.from_vector(v[:, -1])


def _spin_ops_for(rho) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return _spin_arrays(_dim_of(rho))


def qfi_max_collective(rho) -> tuple[float, GeneratorDirection]:
    """Largest QFI over generators ``n . J`` and the maximizing direction.

    The QFI of ``n . J`` is a quadratic form in ``n``; its maximum over the
    unit sphere is the top eigenvalue of the 3 x 3 QFI matrix.
    """
    return _top_direction(qfi_matrix(rho, _spin_ops_for(rho)))


def icosphere(subdivisions: int = 2) -> np.ndarray:
    """Unit vertices of a subdivided icosahedron (12, 42, 162, ... points)."""
    t = (1 + math.sqrt(5)) / 2
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return np.array(verts)


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, e = b - g * (b - a), a + g * (b - a)
    fc, fe = f(c), f(e)
    while b - a > tol:
        if fc > fe:
            b, e, fe = e, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + g * (b - a)
            fe = f(e)
    return (a + b) / 2


def qfi_max_collective_search(rho, tol: float = 1e-6) -> tuple[float, GeneratorDirection]:
    """Derivative-free maximization of ``qfi_spectral(rho, n . J)``.

    Coarse pass over the 162-vertex icosphere, then alternating
    golden-section line searches in the tangent plane of the best vertex,
    shrinking the cap until the direction moves less than ``tol``.
    Slower than :func:`qfi_max_collective`; kept as an independent check.
    """
    ops = _spin_ops_for(rho)

    def F(n):
        n = n / np.linalg.norm(n)
        return qfi_spectral(rho, n[0] * ops[0] + n[1] * ops[1] + n[2] * ops[2])

    grid = icosphere(2)
    vals = [F(n) for n in grid]
    n0 = grid[int(np.argmax(vals))]
    half_width = 0.4
    for _ in range(200):
        e1 = np.cross(n0, [1.0, 0.0, 0.0] if abs(n0[0]) < 0.9 else [0.0, 1.0, 0.0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n0, e1)
        u = _golden_max(lambda x: F(n0 + x * e1), -half_width, half_width, tol / 4)
        n1 = n0 + u * e1
        n1 /= np.linalg.norm(n1)
        v = _golden_max(lambda x: F(n1 + x * e2), -half_width, half_width, tol / 4)
        n2 = n1 + v * e2
        n2 /= np.linalg.norm(n2)
        step = np.linalg.norm(n2 - n0)
        n0 = n2
        if step < tol:
            break
        half_width = max(min(half_width, 4 * step), 10 * tol)
    return F(n0), GeneratorDirection.from_vector(n0)


# --------------------------------------------------------------------------
# resource measures


def _is_pure(rho) -> bool:
    a = _as_state_array(rho)
    if a.ndim == 1:
        return True
    return abs(np.real(np.trace(a @ a)) - 1.0) < 1e-10


def _dim_of(rho) -> int:
    return _as_state_array(rho).shape[0]


def _generator_qfi(rho, generator) -> float:
    if _as_state_array(rho).ndim == 1:
        return qfi_pure(rho, generator)
    return qfi_spectral(rho, generator)


def d_eff(rho, generator=None) -> float:
    """Effective number of degrees of freedom, ``F_max / (d - 1)``.

    With ``generator`` given, the QFI of that fixed generator replaces the
    maximum over collective directions.
    """
    d = _dim_of(rho)
    if generator is None:
        f, _ = qfi_max_collective(rho)
    else:
        f = _generator_qfi(rho, generator)
    value = f / (d - 1)
    if generator is None and _is_pure(rho) and not (1 - 1e-8 <= value <= d - 1 + 1e-8):
        raise NotAStateError(f"pure-state d_eff {value!r} outside [1, {d - 1}]")
    return value


def n_eff(rho_multiqubit, n_qubits: int) -> float:
    """Effective number of qubits: max collective QFI over ``N``."""
    from .multiqubit import collective_spin_arrays

    state = _as_state_array(rho_multiqubit)
    if state.shape[0] != 2 ** n_qubits:
        raise DimensionMismatchError(f"state dim {state.shape[0]} is not 2^{n_qubits}")
    f, _ = _top_direction(qfi_matrix(state, collective_spin_arrays(n_qubits)))
    return f / n_qubits


def nonclassicality(rho) -> float:
    """Excess of the maximal collective QFI over the classical value ``d - 1``."""
    f, _ = qfi_max_collective(rho)
    return f - (_dim_of(rho) - 1)


def metrological_power(rho, generator=None) -> float:
    """``max(d_eff - 1, 0)``."""
    return max(d_eff(rho, generator) - 1.0, 0.0)


def cramer_rao(f_q: float, m: int = 1) -> float:
    """Lower bound ``1 / (m F_Q)`` on the estimator variance (rad^2)."""
    if m < 1:
        raise ValueError(f"number of measurements must be >= 1, got {m}")
    if f_q < 0:
        raise ValueError(f"QFI must be non-negative, got {f_q}")
    if f_q == 0:
        return math.inf
    return 1.0 / (m * f_q)


def qfi_report(rho, m: int = 1) -> QfiReport:
    f, direction = qfi_max_collective(rho)
    de = d_eff(rho)
    return QfiReport(
        f_q=f,
        direction=direction,
        d_eff=de,
        nonclassicality=nonclassicality(rho),
        metrological_power=max(de - 1.0, 0.0),
        crb=cramer_rao(f, m),
    )
