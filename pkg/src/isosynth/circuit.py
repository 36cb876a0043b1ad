"""
Circuit intermediate representation.

Gates are small frozen dataclasses; a Circuit is an immutable gate tuple plus
qubit-role metadata. Qubit 0 is the most significant tensor factor (top wire).

Rotation conventions:

    Rx(t) = [[cos t/2, i sin t/2], [i sin t/2, cos t/2]]
    Ry(t) = [[cos t/2, sin t/2], [-sin t/2, cos t/2]]
    Rz(t) = diag(exp(i t/2), exp(-i t/2))
    R(t, p) = [[cos t/2, -i e^{-ip} sin t/2], [-i e^{ip} sin t/2, cos t/2]]
    XX(p) = cos p * 1 - i sin p * (X (x) X)
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class CircuitError(ValueError):
    """Raised for malformed gates or circuits, or unsupported semantics."""


def canonical_angle(value: float) -> float:
    """Map an angle into (-2pi, 2pi]; rotations are 4pi-periodic."""
    value = float(value)
    if not math.isfinite(value):
        raise CircuitError(f"non-finite angle {value!r}")
    r = math.fmod(value, FOUR_PI)
    if r > TWO_PI:
        r -= FOUR_PI
    elif r <= -TWO_PI:
        r += FOUR_PI
    return r


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gate:
    @property
    def qubits(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def is_unitary(self) -> bool:
        return True


@dataclass(frozen=True)
class Rotation(Gate):
    angle: float
    target: int
    axis = ""

    def __post_init__(self):
        object.__setattr__(self, "angle", canonical_angle(self.angle))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)

    def with_angle(self, angle: float) -> "Rotation":
        return type(self)(angle, self.target)


@dataclass(frozen=True)
class RotX(Rotation):
    axis = "x"


@dataclass(frozen=True)
class RotY(Rotation):
    axis = "y"


@dataclass(frozen=True)
class RotZ(Rotation):
    axis = "z"


ROTATIONS: dict[str, type[Rotation]] = {"x": RotX, "y": RotY, "z": RotZ}


@dataclass(frozen=True)
class CNot(Gate):
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise CircuitError("CNot control and target must differ")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True)
class RGate(Gate):
    theta: float
    phi: float
    target: int

    def __post_init__(self):
        object.__setattr__(self, "theta", canonical_angle(self.theta))
        object.__setattr__(self, "phi", canonical_angle(self.phi))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class XXGate(Gate):
    phi: float
    qubit_a: int
    qubit_b: int

    def __post_init__(self):
        object.__setattr__(self, "phi", canonical_angle(self.phi))
        if self.qubit_a == self.qubit_b:
            raise CircuitError("XXGate qubits must differ")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit_a, self.qubit_b)


@dataclass(frozen=True)
class Measure(Gate):
    target: int
    classical_bit: int = 0

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)

    @property
    def is_unitary(self) -> bool:
        return False


@dataclass(frozen=True)
class TraceOut(Gate):
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)

    @property
    def is_unitary(self) -> bool:
        return False


# ---------------------------------------------------------------------------
# Matrix semantics
# ---------------------------------------------------------------------------

def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, s], [-s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    e = cmath.exp(0.5j * theta)
    return np.array([[e, 0], [0, e.conjugate()]], dtype=complex)


def r_matrix(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -1j * np.exp(-1j * phi) * s], [-1j * np.exp(1j * phi) * s, c]],
        dtype=complex,
    )


def xx_matrix(phi: float) -> np.ndarray:
    c, s = math.cos(phi), -1j * math.sin(phi)
    return np.array(
        [[c, 0, 0, s], [0, c, s, 0], [0, s, c, 0], [s, 0, 0, c]], dtype=complex
    )


ROTATION_MATRIX = {"x": rx, "y": ry, "z": rz}

CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def gate_matrix(g: Gate) -> np.ndarray:
    """Local matrix of a unitary gate.

    Two-qubit gates are returned in the ordering control (x) target, or
    qubit_a (x) qubit_b.
    """
    if isinstance(g, Rotation):
        return ROTATION_MATRIX[g.axis](g.angle)
    if isinstance(g, CNot):
        return CNOT_MATRIX.copy()
    if isinstance(g, RGate):
        return r_matrix(g.theta, g.phi)
    if isinstance(g, XXGate):
        return xx_matrix(g.phi)
    raise CircuitError(f"no matrix semantics for {type(g).__name__}")


def _apply(state: np.ndarray, mat: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply a k-qubit matrix to axes `qubits` of a (2,)*n + (cols,) tensor."""
    k = len(qubits)
    op = mat.reshape((2,) * (2 * k))
    out = np.tensordot(op, state, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, list(range(k)), list(qubits))


def apply_gates(state: np.ndarray, gates: Iterable[Gate], num_qubits: int) -> np.ndarray:
    """Apply unitary gates to the columns of a 2^n x k matrix."""
    n = num_qubits
    psi = np.array(state, dtype=complex)
    dim, cols = psi.shape
    index = np.arange(dim)
    gates = list(gates)
    i = 0
    single = [g.target if isinstance(g, (Rotation, RGate)) else -1 for g in gates]
    while i < len(gates):
        g = gates[i]
        q = single[i]
        i += 1
        if isinstance(g, CNot):
            # permute rows: flip the target bit where the control bit is set
            flip = ((index >> (n - 1 - g.control)) & 1) << (n - 1 - g.target)
            psi = psi[index ^ flip]
        elif q >= 0:
            mat = gate_matrix(g)
            # fuse a run of single-qubit gates on the same wire
            while i < len(gates) and single[i] == q:
                mat = gate_matrix(gates[i]) @ mat
                i += 1
            psi = (mat @ psi.reshape(2**q, 2, -1)).reshape(dim, cols)
        else:
            t = psi.reshape((2,) * n + (cols,))
            psi = _apply(t, gate_matrix(g), g.qubits).reshape(dim, cols)
    return psi


# ---------------------------------------------------------------------------
# Circuit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    ancilla_qubits: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "ancilla_qubits", frozenset(self.ancilla_qubits))
        n = self.num_qubits
        if n < 0:
            raise CircuitError("num_qubits must be non-negative")
        for a in self.ancilla_qubits:
            if not 0 <= a < n:
                raise CircuitError(f"ancilla {a} out of range for {n} qubits")
        traced: set[int] = set()
        bits: set[int] = set()
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < n:
                    raise CircuitError(f"{g} acts on qubit {q} outside 0..{n - 1}")
                if q in traced:
                    raise CircuitError(f"{g} acts on qubit {q} after it was traced out")
            if isinstance(g, TraceOut):
                traced.add(g.target)
            elif isinstance(g, Measure):
                if g.classical_bit in bits:
                    raise CircuitError(f"classical bit {g.classical_bit} written twice")
                bits.add(g.classical_bit)

    # roles -----------------------------------------------------------------
    @property
    def measured_qubits(self) -> frozenset[int]:
        return frozenset(g.target for g in self.gates if isinstance(g, Measure))

    @property
    def traced_qubits(self) -> frozenset[int]:
        return frozenset(g.target for g in self.gates if isinstance(g, TraceOut))

    @property
    def input_qubits(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.num_qubits) if q not in self.ancilla_qubits)

    @property
    def is_unitary(self) -> bool:
        return all(g.is_unitary for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    # construction helpers ----------------------------------------------------
    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise CircuitError("cannot concatenate circuits of different width")
        return Circuit(self.num_qubits, self.gates + other.gates, self.ancilla_qubits)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.num_qubits, tuple(gates), self.ancilla_qubits)

    def with_ancillas(self, ancillas: Iterable[int]) -> "Circuit":
        return Circuit(self.num_qubits, self.gates, frozenset(ancillas))

    def inverse(self) -> "Circuit":
        if not self.is_unitary:
            raise CircuitError("only unitary circuits can be inverted")
        return self.with_gates(invert_gate(g) for g in reversed(self.gates))

    def remap(self, mapping: Sequence[int], num_qubits: int) -> "Circuit":
        """Place this circuit on wires mapping[0], mapping[1], ... of a wider circuit."""
        gates = [remap_gate(g, mapping) for g in self.gates]
        return Circuit(num_qubits, gates, frozenset(mapping[a] for a in self.ancilla_qubits))


def invert_gate(g: Gate) -> Gate:
    if isinstance(g, Rotation):
        return g.with_angle(-g.angle)
    if isinstance(g, CNot):
        return g
    if isinstance(g, RGate):
        return RGate(-g.theta, g.phi, g.target)
    if isinstance(g, XXGate):
        return XXGate(-g.phi, g.qubit_a, g.qubit_b)
    raise CircuitError(f"{type(g).__name__} has no inverse")


def remap_gate(g: Gate, m: Sequence[int]) -> Gate:
    if isinstance(g, Rotation):
        return type(g)(g.angle, m[g.target])
    if isinstance(g, CNot):
        return CNot(m[g.control], m[g.target])
    if isinstance(g, RGate):
        return RGate(g.theta, g.phi, m[g.target])
    if isinstance(g, XXGate):
        return XXGate(g.phi, m[g.qubit_a], m[g.qubit_b])
    if isinstance(g, Measure):
        return Measure(m[g.target], g.classical_bit)
    if isinstance(g, TraceOut):
        return TraceOut(m[g.target])
    raise CircuitError(f"cannot remap {g!r}")


def circuit_matrix(c: Circuit) -> np.ndarray:
    """The 2^n x 2^n unitary implemented by a measurement-free circuit."""
    if not c.is_unitary:
        raise CircuitError("not a pure unitary circuit")
    dim = 2**c.num_qubits
    return apply_gates(np.eye(dim, dtype=complex), c.gates, c.num_qubits)


def isometry_input_columns(c: Circuit) -> list[int]:
    """Basis indices of the full register where all ancillas read 0."""
    n = c.num_qubits
    inputs = c.input_qubits
    cols = []
    for j in range(2 ** len(inputs)):
        idx = 0
        for pos, q in enumerate(inputs):
            if (j >> (len(inputs) - 1 - pos)) & 1:
                idx |= 1 << (n - 1 - q)
        cols.append(idx)
    return cols


def circuit_isometry(c: Circuit) -> np.ndarray:
    """The 2^n x 2^m isometry obtained by fixing ancillas to |0>."""
    if not c.is_unitary:
        raise CircuitError("not a pure unitary circuit")
    n = c.num_qubits
    cols = isometry_input_columns(c)
    start = np.zeros((2**n, len(cols)), dtype=complex)
    start[cols, np.arange(len(cols))] = 1.0
    return apply_gates(start, c.gates, n)


def unitary_part(c: Circuit) -> Circuit:
    """The circuit with trailing Measure/TraceOut gates removed."""
    return c.with_gates(g for g in c.gates if g.is_unitary)


def cnot_count(c: Circuit) -> int:
    return sum(isinstance(g, CNot) for g in c.gates)


def rotation_count(c: Circuit) -> int:
    return sum(isinstance(g, (Rotation, RGate)) for g in c.gates)


def two_qubit_count(c: Circuit) -> int:
    return sum(isinstance(g, (CNot, XXGate)) for g in c.gates)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def gate_to_dict(g: Gate) -> dict:
    if isinstance(g, Rotation):
        return {"kind": "r" + g.axis, "angle": g.angle, "target": g.target}
    if isinstance(g, CNot):
        return {"kind": "cnot", "control": g.control, "target": g.target}
    if isinstance(g, RGate):
        return {"kind": "r", "theta": g.theta, "phi": g.phi, "target": g.target}
    if isinstance(g, XXGate):
        return {"kind": "xx", "phi": g.phi, "qubits": [g.qubit_a, g.qubit_b]}
    if isinstance(g, Measure):
        return {"kind": "measure", "target": g.target, "bit": g.classical_bit}
    if isinstance(g, TraceOut):
        return {"kind": "trace", "target": g.target}
    raise CircuitError(f"cannot serialize {g!r}")


def gate_from_dict(d: dict) -> Gate:
    kind = d.get("kind")
    try:
        if kind in ("rx", "ry", "rz"):
            return ROTATIONS[kind[1]](float(d["angle"]), int(d["target"]))
        if kind == "cnot":
            return CNot(int(d["control"]), int(d["target"]))
        if kind == "r":
            return RGate(float(d["theta"]), float(d["phi"]), int(d["target"]))
        if kind == "xx":
            a, b = d["qubits"]
            return XXGate(float(d["phi"]), int(a), int(b))
        if kind == "measure":
            return Measure(int(d["target"]), int(d.get("bit", 0)))
        if kind == "trace":
            return TraceOut(int(d["target"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CircuitError(f"malformed gate {d!r}: {exc}") from exc
    raise CircuitError(f"unknown gate kind {kind!r}")


def circuit_to_dict(c: Circuit) -> dict:
    return {
        "num_qubits": c.num_qubits,
        "ancillas": sorted(c.ancilla_qubits),
        "gates": [gate_to_dict(g) for g in c.gates],
    }


def circuit_from_dict(d: dict) -> Circuit:
    try:
        n = int(d["num_qubits"])
        gates = [gate_from_dict(g) for g in d.get("gates", [])]
        ancillas = [int(a) for a in d.get("ancillas", [])]
    except (KeyError, TypeError) as exc:
        raise CircuitError(f"malformed circuit document: {exc}") from exc
    return Circuit(n, gates, frozenset(ancillas))


def circuit_to_json(c: Circuit, indent: int | None = None) -> str:
    return json.dumps(circuit_to_dict(c), indent=indent)


def circuit_from_json(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))
