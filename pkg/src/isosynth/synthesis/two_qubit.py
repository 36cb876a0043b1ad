"""Two-qubit unitaries with at most three CNOTs via the magic-basis canonical form."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..circuit import (CNot, Circuit, Gate, RotX, RotY, RotZ, gate_matrix,
                       remap_gate)
from ..numerics import ValidationError, check_unitary
from .multiplexor import single_qubit_gates

MAGIC = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / math.sqrt(2)

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)
# diagonal sign patterns of XX, YY, ZZ in the magic basis
_SIGNS = np.array([np.diag(MAGIC.conj().T @ np.kron(p, p) @ MAGIC).real for p in (_X, _Y, _Z)])
_SOLVE = np.linalg.inv(np.column_stack([np.ones(4), _SIGNS.T]))

# reconstruction error accepted before trying a core with more CNOTs
ACCEPT = 1e-10
ZERO_COORD = 1e-9


def _special(u: np.ndarray) -> np.ndarray:
    return u / np.linalg.det(u) ** 0.25


def _to_magic(u: np.ndarray) -> np.ndarray:
    return MAGIC.conj().T @ _special(u) @ MAGIC


def _real_diagonalizer(m: np.ndarray) -> np.ndarray:
    """Real orthogonal P with P^T m P diagonal, for symmetric unitary m."""
    re, im = m.real, m.imag
    for r in (0.5377, 1.8339, -2.2588, 0.8622, 0.3188):
        _, p = np.linalg.eigh(re + r * im)
        d = p.T @ m @ p
        if np.linalg.norm(d - np.diag(np.diag(d))) < 1e-9:
            if np.linalg.det(p) < 0:
                p[:, 0] = -p[:, 0]
            return p
    raise ValidationError("could not diagonalize the two-qubit invariant matrix")


def canonical_coordinates(u: np.ndarray) -> np.ndarray:
    """Interaction coefficients (a, b, c), each reduced into (-pi/4, pi/4].

    u is locally equivalent to exp(i (a XX + b YY + c ZZ)).
    """
    t = _to_magic(u)
    lam = np.linalg.eigvals(t.T @ t)
    theta = np.angle(lam) / 2
    if abs(math.remainder(theta.sum(), 2 * math.pi)) > 1:
        theta[0] += math.pi
    coords = (_SOLVE @ theta)[1:]
    reduced = np.array([math.remainder(c, math.pi / 2) for c in coords])
    reduced[np.isclose(reduced, -math.pi / 4, atol=1e-12)] = math.pi / 4
    return reduced


def local_split(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor a 4x4 product a (x) b, up to phase, by a rank-one fit."""
    r = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    w, s, vh = np.linalg.svd(r)
    a = math.sqrt(s[0]) * w[:, 0].reshape(2, 2)
    b = math.sqrt(s[0]) * vh[0].reshape(2, 2)
    return a, b


def _nearest_orthogonal(o: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(o.real)
    return w @ vh


def local_equivalence(u: np.ndarray, core: np.ndarray):
    """Find locals with u = e^{i g} (a1 (x) b1) core (a2 (x) b2).

    Returns ((a1, b1), (a2, b2)) or None if u and core are not locally
    equivalent.
    """
    tu, tc = _to_magic(u), _to_magic(core)
    mu, mc = tu.T @ tu, tc.T @ tc
    pu = _real_diagonalizer(mu)
    du = np.diag(pu.T @ mu @ pu)
    for sign, tphase in ((1, 1), (-1, 1j)):
        # scaling the core's magic form by i flips the sign of its invariant
        q = _real_diagonalizer(sign * mc)
        dc = np.diag(q.T @ (sign * mc) @ q)
        cost = np.abs(du[:, None] - dc[None, :])
        rows, cols = linear_sum_assignment(cost)
        if cost[rows, cols].max() > 1e-6:
            continue
        q = q[:, cols]
        if np.linalg.det(q) * np.linalg.det(pu) < 0:
            q[:, 0] = -q[:, 0]
        o2 = _nearest_orthogonal(q @ pu.T)
        o1 = _nearest_orthogonal(tu @ o2.T @ (tphase * tc).conj().T)
        k1 = MAGIC @ o1 @ MAGIC.conj().T
        k2 = MAGIC @ o2 @ MAGIC.conj().T
        return local_split(k1), local_split(k2)
    return None


# ---------------------------------------------------------------------------
# canonical cores on wires (0, 1) in time order
# ---------------------------------------------------------------------------

def _core_gates(coords: np.ndarray, cnots: int) -> list[Gate]:
    a, b, c = coords
    if cnots == 0:
        return []
    if cnots == 1:
        return [CNot(0, 1)]
    if cnots == 2:
        x, y = sorted(coords, key=abs)[1:]
        return [CNot(0, 1), RotX(2 * x, 0), RotZ(2 * y, 1), CNot(0, 1)]
    p, q, r = 2 * c + math.pi / 2, 2 * a + math.pi / 2, 2 * b + math.pi / 2
    return [CNot(1, 0), RotZ(-p, 0), RotY(-q, 1), CNot(0, 1), RotY(-r, 1), CNot(1, 0)]


def _minimum_cnots(coords: np.ndarray) -> int:
    small = np.abs(coords) < ZERO_COORD
    if small.all():
        return 0
    quarter = np.abs(np.abs(coords) - math.pi / 4) < ZERO_COORD
    if small.sum() == 2 and quarter.sum() == 1:
        return 1
    if small.any():
        return 2
    return 3


# row permutations applying CNOT(0 -> 1) and CNOT(1 -> 0)
_CX_ROWS = {0: [0, 1, 3, 2], 1: [0, 3, 2, 1]}


def _matrix(gates: list[Gate]) -> np.ndarray:
    """4x4 matrix of a gate list on wires (0, 1)."""
    out = np.eye(4, dtype=complex)
    for g in gates:
        if isinstance(g, CNot):
            out = out[_CX_ROWS[g.control]]
        elif g.target == 0:
            out = (gate_matrix(g) @ out.reshape(2, 8)).reshape(4, 4)
        else:
            out = (gate_matrix(g) @ out.reshape(2, 2, 4)).reshape(4, 4)
    return out


def _phase_error(a: np.ndarray, b: np.ndarray) -> float:
    ov = np.vdot(b, a)
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - ph * b))


def two_qubit_gates(u, q0: int = 0, q1: int = 1) -> list[Gate]:
    """Rotation/CNOT gate list for a 4x4 unitary on wires (q0, q1), time order."""
    u = check_unitary(u)
    if u.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 unitary, got {u.shape}")
    return _two_qubit_gates(u, q0, q1)


def _two_qubit_gates(u: np.ndarray, q0: int, q1: int) -> list[Gate]:
    coords = canonical_coordinates(u)
    for cnots in range(_minimum_cnots(coords), 4):
        core = _core_gates(coords, cnots)
        found = local_equivalence(u, _matrix(core))
        if found is None:
            continue
        (a1, b1), (a2, b2) = found
        gates = (single_qubit_gates(a2, 0) + single_qubit_gates(b2, 1) + core
                 + single_qubit_gates(a1, 0) + single_qubit_gates(b1, 1))
        if _phase_error(_matrix(gates), u) <= ACCEPT:
            return [remap_gate(g, (q0, q1)) for g in gates]
    raise ValidationError("two-qubit synthesis failed to reach tolerance")


def two_qubit_unitary(u) -> Circuit:
    """Circuit with at most three CNOTs implementing u up to global phase."""
    return Circuit(2, tuple(two_qubit_gates(u)))
