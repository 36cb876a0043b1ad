"""Retargeting between CNOT circuits and the trapped-ion {R, XX} gate set."""
from __future__ import annotations

import math

import numpy as np

from .circuit import (CNot, Circuit, CircuitError, Gate, RGate, Rotation, RotX, RotY, RotZ,
                      XXGate, gate_matrix, rx)
from .numerics import r_rx_decompose

ZERO_TOL = 1e-10


def _split_tail(c: Circuit) -> tuple[list[Gate], list[Gate]]:
    """Unitary gates, then the Measure/TraceOut gates moved to the end.

    Moving is only allowed when no unitary gate touches a wire after it was
    measured or traced.
    """
    body, tail = [], []
    closed: set[int] = set()
    for g in c.gates:
        if g.is_unitary:
            if closed & set(g.qubits):
                raise CircuitError(f"{g} acts on a measured wire; cannot retarget")
            body.append(g)
        else:
            closed.update(g.qubits)
            tail.append(g)
    return body, tail


def _is_zero(angle: float) -> bool:
    # identity up to phase
    return abs(math.remainder(angle, 2 * math.pi)) <= ZERO_TOL


def cnot_as_xx(g: CNot) -> list[Gate]:
    """One CNOT as a single XX(pi/4) dressed with single-qubit rotations."""
    c, t = g.control, g.target
    return [RotY(-math.pi / 2, c), XXGate(math.pi / 4, c, t),
            RotX(math.pi / 2, c), RotY(math.pi / 2, c), RotX(math.pi / 2, t)]


def _r_gates(u: np.ndarray, wire: int) -> tuple[list[Gate], np.ndarray]:
    """Split u into an R gate (returned) and an Rx factor to its left."""
    f = r_rx_decompose(u)
    gates = [] if _is_zero(f.theta) else [RGate(f.theta, f.phi, wire)]
    return gates, rx(f.delta)


def ion_merge(c: Circuit) -> Circuit:
    """Leave at most one R gate after each XX, plus a leading Rx per wire.

    Walks from the end. At each XX the buffered single-qubit unitary on each
    of its wires is written as R Rx; the R stays behind the XX and the Rx,
    which commutes with XX, is pushed further left.
    """
    body, tail = _split_tail(c)
    n = c.num_qubits
    pending = [np.eye(2, dtype=complex) for _ in range(n)]
    out: list[Gate] = []  # reverse time order
    for g in reversed(body):
        if isinstance(g, (Rotation, RGate)):
            pending[g.target] = pending[g.target] @ gate_matrix(g)
        elif isinstance(g, XXGate):
            for w in (g.qubit_a, g.qubit_b):
                emitted, pending[w] = _r_gates(pending[w], w)
                out.extend(emitted)
            out.append(g)
        else:
            raise CircuitError(f"ion_merge expects R, rotation and XX gates, got {g!r}")
    for w in range(n):
        f = r_rx_decompose(pending[w])
        if not _is_zero(f.theta):
            out.append(RGate(f.theta, f.phi, w))
        if not _is_zero(f.delta):
            out.append(RotX(f.delta, w))
    return c.with_gates(list(reversed(out)) + tail)


def cnot_to_xx_circuit(c: Circuit, merge: bool = True) -> Circuit:
    """Replace every CNOT by one XX gate; the XX count equals the CNOT count."""
    body, tail = _split_tail(c)
    gates: list[Gate] = []
    for g in body:
        if isinstance(g, CNot):
            gates.extend(cnot_as_xx(g))
        elif isinstance(g, Rotation):
            gates.append(g)
        else:
            raise CircuitError(f"expected rotations and CNOTs, got {g!r}")
    converted = c.with_gates(gates + tail)
    return ion_merge(converted) if merge else converted


def r_as_rotations(g: RGate) -> list[Gate]:
    """R(theta, phi) over Rx/Ry/Rz; axis-aligned cases use a single gate."""
    t, phi, w = g.theta, g.phi, g.target
    if _is_zero(t):
        return []
    for axis_phi, gate in ((0.0, RotX(-t, w)), (math.pi / 2, RotY(-t, w)),
                           (math.pi, RotX(t, w)), (-math.pi / 2, RotY(t, w))):
        if abs(math.remainder(phi - axis_phi, 2 * math.pi)) <= ZERO_TOL:
            return [gate]
    # rotation about cos(phi) X + sin(phi) Y
    return [RotZ(phi, w), RotX(-t, w), RotZ(-phi, w)]


def xx_as_cnots(g: XXGate) -> list[Gate]:
    """XX(phi) = CNOT (exp(-i phi X) on the control) CNOT."""
    a, b = g.qubit_a, g.qubit_b
    if _is_zero(2 * g.phi):
        return []
    return [CNot(a, b), RotX(-2 * g.phi, a), CNot(a, b)]


def xx_to_cnot_circuit(c: Circuit) -> Circuit:
    """Rewrite an {R, XX} circuit over rotations and CNOTs."""
    body, tail = _split_tail(c)
    gates: list[Gate] = []
    for g in body:
        if isinstance(g, XXGate):
            gates.extend(xx_as_cnots(g))
        elif isinstance(g, RGate):
            gates.extend(r_as_rotations(g))
        elif isinstance(g, Rotation):
            gates.append(g)
        else:
            raise CircuitError(f"expected R, rotation and XX gates, got {g!r}")
    return c.with_gates(gates + tail)


def ion_normal_form_violations(c: Circuit) -> list[str]:
    """Structural check of the merged form; an empty list means it holds.

    Per wire: before its first XX at most one Rx followed by one R, and
    between consecutive XX gates (and after the last) at most one R. No other
    gate kinds may appear.
    """
    problems = []
    seen_xx = [False] * c.num_qubits
    slot: list[list[Gate]] = [[] for _ in range(c.num_qubits)]

    def close(w: int, where: str) -> None:
        kinds = [type(g) for g in slot[w]]
        allowed = ([[], [RGate]] if seen_xx[w]
                   else [[], [RGate], [RotX], [RotX, RGate]])
        if kinds not in allowed:
            problems.append(f"wire {w} {where}: {[k.__name__ for k in kinds]}")
        slot[w] = []

    for i, g in enumerate(c.gates):
        if not g.is_unitary:
            continue
        if isinstance(g, XXGate):
            for w in g.qubits:
                close(w, f"before gate {i}")
                seen_xx[w] = True
        elif isinstance(g, (RGate, RotX)) and len(g.qubits) == 1:
            slot[g.target].append(g)
        else:
            problems.append(f"gate {i} ({type(g).__name__}) is not an R, Rx or XX gate")
    for w in range(c.num_qubits):
        close(w, "at the end")
    return problems
