"""Isometry synthesis: QSD, Knill's eigenvector scheme, Householder, Schmidt state prep.

All internal builders return gate lists in time order on an explicit wire
list. For an isometry on wires (w_0, ..., w_{n-1}) the inputs live on the last
m wires and the leading n - m wires are ancillas starting in |0>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from ..circuit import CNot, Circuit, Gate, invert_gate
from ..numerics import (ValidationError, as_matrix, check_isometry, check_unitary,
                        complete_to_unitary, cosine_sine_decompose, num_qubits_of,
                        orthonormal_complement, unitary_eig,
                        unitary_extension_max_unit_eigs)
from .multiplexor import demultiplex_rotation, diagonal_gates, single_qubit_gates
from .two_qubit import _two_qubit_gates, canonical_coordinates

_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])

UNIT_EIG_TOL = 1e-8
SKIP_REFLECTION = 1e-10


def isometry_dims(v: np.ndarray) -> tuple[int, int]:
    """(m, n) for a 2^n x 2^m matrix."""
    return num_qubits_of(v.shape[1]), num_qubits_of(v.shape[0])


def inverse_gates(gates: Sequence[Gate]) -> list[Gate]:
    return [invert_gate(g) for g in reversed(gates)]


def _circuit(gates: Sequence[Gate], n: int, m: int) -> Circuit:
    return Circuit(n, tuple(gates), frozenset(range(n - m)))


# ---------------------------------------------------------------------------
# Quantum Shannon decomposition
# ---------------------------------------------------------------------------

def _demultiplex_pair(a1: np.ndarray, a2: np.ndarray):
    """a1 = V D W and a2 = V D^dag W with D diagonal; returns (V, phases, W)."""
    lam, v = unitary_eig(a1 @ a2.conj().T)
    phases = 0.5 * np.angle(lam)
    w = np.diag(np.exp(1j * phases)) @ v.conj().T @ a2
    return v, phases, w


def _block_gates(b1: np.ndarray, b2: np.ndarray, wires: Sequence[int]) -> list[Gate]:
    """Gates for the block diagonal b1 (+) b2 selected by wires[0]."""
    v, phases, w = _demultiplex_pair(b1, b2)
    rest = list(wires[1:])
    return (_qsd_gates(w, rest)
            + demultiplex_rotation(2 * phases, "z", rest, wires[0])
            + _qsd_gates(v, rest))


def _qsd_gates(u: np.ndarray, wires: Sequence[int]) -> list[Gate]:
    n = len(wires)
    if n == 1:
        return single_qubit_gates(u, wires[0])
    if n == 2:
        return _two_qubit_gates(u, wires[0], wires[1])
    csd = cosine_sine_decompose(u)
    (l1, l2), (r1, r2) = csd.left_blocks, csd.right_blocks
    # the middle factor [[C, -S], [S, C]] is Ry(-2 t_j) on wires[0]
    middle = demultiplex_rotation(-2 * csd.angles, "y", list(wires[1:]), wires[0])
    return _block_gates(r1, r2, wires) + middle + _block_gates(l1, l2, wires)


def qsd_cnot_ceiling(n: int) -> int:
    if n <= 1:
        return 0
    if n == 2:
        return 3
    return 4 * qsd_cnot_ceiling(n - 1) + 3 * 2 ** (n - 1)


def qsd(u) -> Circuit:
    """Quantum Shannon decomposition of a 2^n x 2^n unitary."""
    u = check_unitary(u)
    n = num_qubits_of(u.shape[0])
    if n == 0:
        return Circuit(0)
    return Circuit(n, tuple(_qsd_gates(u, list(range(n)))))


def _random_su2(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return q / np.sqrt(np.linalg.det(q))


_RNG = np.random.default_rng(0)
# fixed sample points for the completion search, so results are deterministic
_SU2_SAMPLES = [_random_su2(_RNG) for _ in range(16)]
del _RNG


def _two_cnot_completion(v: np.ndarray) -> np.ndarray | None:
    """Complete a 4x2 isometry to a unitary that needs only two CNOTs.

    Completions are [v | W Q] with W a fixed complement and Q in SU(2). Two
    CNOTs suffice exactly when tr(U (YY) U^T (YY)) / sqrt(det U) is real, and
    det U does not depend on Q, so we look for a sign change of the imaginary
    part along a geodesic in SU(2) and polish the root.
    """
    comp = orthonormal_complement(v)
    root_det = np.sqrt(np.linalg.det(np.hstack([v, comp])))

    def completion(q: np.ndarray) -> np.ndarray:
        return np.hstack([v, comp @ q])

    def imag_trace(q: np.ndarray) -> float:
        u = completion(q)
        return float((np.trace(u @ _YY @ u.T @ _YY) / root_det).imag)

    qs = _SU2_SAMPLES
    vals = [imag_trace(q) for q in qs]
    for q, f in zip(qs, vals):
        if abs(f) < 1e-13:
            return completion(q)
    pos = [q for q, f in zip(qs, vals) if f > 0]
    neg = [q for q, f in zip(qs, vals) if f < 0]
    if not pos or not neg:
        return None
    qa, qb = pos[0], neg[0]
    lam, z = unitary_eig(qa.conj().T @ qb)
    ang = np.angle(lam)

    def path(t: float) -> np.ndarray:
        return qa @ z @ np.diag(np.exp(1j * t * ang)) @ z.conj().T

    t = brentq(lambda t: imag_trace(path(t)), 0.0, 1.0, xtol=1e-15, rtol=1e-15)
    u = completion(path(t))
    if np.min(np.abs(canonical_coordinates(u))) < 1e-10:
        return u
    return None


def _isometry_gates(v: np.ndarray, wires: Sequence[int]) -> list[Gate]:
    """QSD of a completion of v; ancillas are the leading wires."""
    m, n = isometry_dims(v)
    if n == 0:
        return []
    if m == n:
        return _qsd_gates(v, wires)
    if n == 2 and m == 1:
        u = _two_cnot_completion(v)
        if u is not None:
            return _two_qubit_gates(u, wires[0], wires[1])
    return _qsd_gates(complete_to_unitary(v), wires)


def qsd_isometry(v) -> Circuit:
    """QSD applied to an orthonormal completion of an isometry."""
    v = check_isometry(v)
    m, n = isometry_dims(v)
    return _circuit(_isometry_gates(v, list(range(n))), n, m)


# ---------------------------------------------------------------------------
# Schmidt state preparation
# ---------------------------------------------------------------------------

def _state_gates(psi: np.ndarray, wires: Sequence[int]) -> list[Gate]:
    n = len(wires)
    if n == 0:
        return []
    if n == 1:
        a, b = psi
        return single_qubit_gates(np.array([[a, -np.conj(b)], [b, np.conj(a)]]), wires[0])
    k = (n + 1) // 2
    left, right = list(wires[:k]), list(wires[k:])
    w, s, vh = np.linalg.svd(psi.reshape(2**k, 2 ** (n - k)))
    rank = int(np.sum(s > 1e-12 * s[0]))
    r = math.ceil(math.log2(rank)) if rank > 1 else 0
    if r == 0:
        return _state_gates(w[:, 0], left) + _state_gates(vh[0], right)
    size = 2**r
    gates = _state_gates(s[:size].astype(complex), left[k - r:])
    gates += [CNot(left[k - r + i], right[len(right) - r + i]) for i in range(r)]
    gates += _isometry_gates(w[:, :size], left)
    gates += _isometry_gates(vh[:size].T, right)
    return gates


def state_prep_schmidt(psi) -> Circuit:
    """Circuit mapping |0...0> to psi (up to phase) via recursive Schmidt splits."""
    psi = as_matrix(psi)
    if psi.shape[1] != 1:
        raise ValidationError(f"state must be a single column, got {psi.shape}")
    psi = psi[:, 0]
    n = num_qubits_of(psi.size)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > 1e-10:
        raise ValidationError(f"state norm {norm:.12f} is not 1")
    return _circuit(_state_gates(psi, list(range(n))), n, 0)


# ---------------------------------------------------------------------------
# Knill's decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KnillSpectrum:
    """Non-unit eigenpairs of a unitary extension: U = prod_i (1 + (e^{i t_i} - 1)|v_i><v_i|)."""

    unitary: np.ndarray
    thetas: np.ndarray
    vectors: np.ndarray

    @property
    def t(self) -> int:
        return int(self.thetas.size)

    def product(self) -> np.ndarray:
        dim = self.unitary.shape[0]
        out = np.eye(dim, dtype=complex)
        for th, vec in zip(self.thetas, self.vectors.T):
            out = out @ (np.eye(dim) + (np.exp(1j * th) - 1) * np.outer(vec, vec.conj()))
        return out


def knill_spectrum(v) -> KnillSpectrum:
    v = check_isometry(v)
    u = unitary_extension_max_unit_eigs(v)
    lam, vecs = unitary_eig(u)
    keep = np.abs(lam - 1) > UNIT_EIG_TOL
    return KnillSpectrum(u, np.angle(lam[keep]), vecs[:, keep])


def knill(v) -> Circuit:
    """Product of conjugated single-eigenvector phase gates V_i P_i V_i^dag."""
    v = check_isometry(v)
    m, n = isometry_dims(v)
    spec = knill_spectrum(v)
    wires = list(range(n))
    gates: list[Gate] = []
    for th, vec in zip(spec.thetas, spec.vectors.T):
        prep = _state_gates(vec, wires)
        phases = np.zeros(2**n)
        phases[0] = th
        gates += inverse_gates(prep) + diagonal_gates(phases, wires) + prep
    return _circuit(gates, n, m)


# ---------------------------------------------------------------------------
# Householder reflections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HouseholderPlan:
    """Reflection normals (None when skipped), column phases and working matrices."""

    normals: list[np.ndarray | None]
    phases: np.ndarray
    stages: list[np.ndarray]


def householder_plan(v) -> HouseholderPlan:
    v = check_isometry(v)
    work = v.copy()
    normals: list[np.ndarray | None] = []
    stages = []
    for j in range(v.shape[1]):
        col = work[:, j]
        phase = np.exp(1j * np.angle(col[j])) if abs(col[j]) > 0 else 1.0
        target = np.zeros_like(col)
        target[j] = phase
        if np.linalg.norm(col - target) <= SKIP_REFLECTION:
            normals.append(None)
        else:
            # reflect onto -phase|j> so that col - target never cancels
            diff = col + target
            w = diff / np.linalg.norm(diff)
            work = work - 2 * np.outer(w, w.conj() @ work)
            normals.append(w)
        stages.append(work.copy())
    phases = np.angle(np.diag(work[: v.shape[1]]))
    return HouseholderPlan(normals, phases, stages)


def householder(v) -> Circuit:
    """Sequence of reflections 1 - 2|w><w|, each built as prep, phase flip, unprep.

    The circuit applies the column phases first and then the reflections in
    reverse order of their discovery.
    """
    v = check_isometry(v)
    m, n = isometry_dims(v)
    wires = list(range(n))
    plan = householder_plan(v)
    flip = np.zeros(2**n)
    flip[0] = math.pi
    gates: list[Gate] = diagonal_gates(plan.phases, wires[n - m:])
    for w in reversed(plan.normals):
        if w is None:
            continue
        prep = _state_gates(w, wires)
        gates += inverse_gates(prep) + diagonal_gates(flip, wires) + prep
    return _circuit(gates, n, m)


# ---------------------------------------------------------------------------
# random inputs
# ---------------------------------------------------------------------------

def random_isometry(m: int, n: int, seed: int | None = None) -> np.ndarray:
    """Haar-random 2^n x 2^m isometry from orthonormalized Gaussian columns."""
    if m > n or m < 0:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(2**n, 2**m)) + 1j * rng.normal(size=(2**n, 2**m))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
