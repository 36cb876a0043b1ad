"""Uniformly controlled rotations, diagonal gates and single-qubit emission."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..circuit import CNot, Circuit, Gate, Rotation, RotX, RotY, RotZ
from ..numerics import euler_angles

ZERO_ANGLE = 1e-12


def gray_code(i: int) -> int:
    return i ^ (i >> 1)


def single_qubit_gates(u: np.ndarray, target: int, axes: str = "ZYZ",
                       keep_zeros: bool = False) -> list[Gate]:
    """Rotations realizing a 2x2 unitary up to phase, in time order."""
    _, beta, gamma, delta = euler_angles(np.asarray(u, dtype=complex), axes)
    outer = RotZ if axes == "ZYZ" else RotX
    gates: list[Gate] = [outer(delta, target), RotY(gamma, target), outer(beta, target)]
    if keep_zeros:
        return gates
    return [g for g in gates if abs(g.angle) > ZERO_ANGLE]


def demultiplex_angles(angles: Sequence[float]) -> np.ndarray:
    """Angles of the Gray-code rotation ladder, indexed by ladder step."""
    theta = np.asarray(angles, dtype=float)
    size = theta.size
    k = size.bit_length() - 1
    if 1 << k != size:
        raise ValueError(f"number of angles {size} is not a power of two")
    j = np.arange(size)
    g = np.array([gray_code(i) for i in range(size)])
    parity = np.array([[bin(a & b).count("1") & 1 for b in g] for a in j])
    signs = 1 - 2 * parity
    return signs.T @ theta / size


def demultiplex_rotation(angles: Sequence[float], axis: str, controls: Sequence[int],
                         target: int) -> list[Gate]:
    """Gate list for a rotation on `target` by angles[j] when `controls` read j.

    controls[0] is the most significant bit of j. The ladder has 2^k rotations
    and 2^k CNOTs for k >= 1 controls; zero angles are kept.
    """
    axis = axis.lower()
    if axis not in ("y", "z"):
        raise ValueError(f"multiplexed rotations support axes y and z, not {axis!r}")
    cls = RotY if axis == "y" else RotZ
    k = len(controls)
    if len(angles) != 1 << k:
        raise ValueError(f"{len(angles)} angles given for {k} controls")
    if k == 0:
        return [cls(float(angles[0]), target)]
    alpha = demultiplex_angles(angles)
    size = 1 << k
    gates: list[Gate] = []
    for i in range(size):
        gates.append(cls(float(alpha[i]), target))
        flip = gray_code(i) ^ gray_code((i + 1) % size)
        bit = flip.bit_length() - 1
        gates.append(CNot(controls[k - 1 - bit], target))
    return gates


def diagonal_gates(phases: Sequence[float], qubits: Sequence[int]) -> list[Gate]:
    """Gate list for diag(exp(i phases)) on `qubits` (first is most significant).

    The global phase is dropped. Costs 2^n - 2 CNOTs.
    """
    phases = np.asarray(phases, dtype=float)
    n = len(qubits)
    if phases.size != 1 << n:
        raise ValueError(f"{phases.size} phases given for {n} qubits")
    gates: list[Gate] = []
    while n >= 1:
        a, b = phases[0::2], phases[1::2]
        # diag(e^{ia}, e^{ib}) = e^{i(a+b)/2} Rz(a - b)
        gates += demultiplex_rotation(a - b, "z", list(qubits[: n - 1]), qubits[n - 1])
        phases = 0.5 * (a + b)
        n -= 1
    return gates


def as_circuit(gates: Sequence[Gate], num_qubits: int) -> Circuit:
    return Circuit(num_qubits, tuple(gates))


def drop_zero_rotations(gates: Sequence[Gate], tol: float = ZERO_ANGLE) -> list[Gate]:
    return [g for g in gates if not (isinstance(g, Rotation) and abs(g.angle) <= tol)]
