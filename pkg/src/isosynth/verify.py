"""Numerical oracle: phase-invariant distance, channel and instrument simulation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuit import (Circuit, CircuitError, Measure, TraceOut, circuit_isometry,
                      unitary_part)


def phase_invariant_distance(a, b) -> float:
    """min over phi of ||a - e^{i phi} b||_F."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    # the optimal phase is arg tr(b^dag a); evaluating the norm directly avoids
    # the cancellation in ||a||^2 + ||b||^2 - 2|tr(a^dag b)|
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def _kraus_from_circuit(c: Circuit) -> tuple[list[int], np.ndarray]:
    """Circuit isometry reshaped as (kept wires, discarded wires, inputs).

    Returns the list of kept wires (in order) and a tensor
    T[kept_index, traced_index, input_index].
    """
    w = circuit_isometry(unitary_part(c))
    n = c.num_qubits
    traced = sorted(c.traced_qubits)
    kept = [q for q in range(n) if q not in traced]
    t = w.reshape((2,) * n + (w.shape[1],))
    t = np.transpose(t, kept + traced + [n])
    return kept, t.reshape(2 ** len(kept), 2 ** len(traced), w.shape[1])


def circuit_kraus(c: Circuit) -> list[np.ndarray]:
    """Kraus operators of the map induced by a circuit with trailing trace-outs."""
    if c.measured_qubits:
        raise CircuitError("circuit measures; use instrument_distribution instead")
    _, t = _kraus_from_circuit(c)
    return [t[:, i, :] for i in range(t.shape[1])]


def kraus_choi(kraus) -> np.ndarray:
    """Unnormalized Choi matrix sum_ij |i><j| (x) E(|i><j|)."""
    # row a is vec of (1 (x) A_a)|Phi> with |Phi> = sum_i |i>|i>; entry (i, o) = A_a[o, i]
    vecs = np.array([np.asarray(k, dtype=complex).T.reshape(-1) for k in kraus])
    return vecs.T @ vecs.conj()


def circuit_choi(c: Circuit) -> np.ndarray:
    return kraus_choi(circuit_kraus(c))


@dataclass(frozen=True)
class InstrumentBranches:
    """Per-outcome Kraus operators of a measuring circuit.

    outcomes[j] is the classical bit string (most significant first) and
    kraus[j] the list of operators mapping inputs to the unmeasured,
    untraced wires.
    """

    outcomes: list[tuple[int, ...]]
    kraus: list[list[np.ndarray]]

    def branch_states(self, rho: np.ndarray) -> list[np.ndarray]:
        return [sum(a @ rho @ a.conj().T for a in ks) for ks in self.kraus]

    def effects(self) -> list[np.ndarray]:
        return [sum(a.conj().T @ a for a in ks) for ks in self.kraus]


def instrument_branches(c: Circuit) -> InstrumentBranches:
    meas = [g for g in c.gates if isinstance(g, Measure)]
    if not meas:
        raise CircuitError("circuit has no Measure gates")
    meas = sorted(meas, key=lambda g: g.classical_bit)
    wires = [g.target for g in meas]
    w = circuit_isometry(unitary_part(c))
    n = c.num_qubits
    traced = sorted(c.traced_qubits - set(wires))
    rest = [q for q in range(n) if q not in traced and q not in wires]
    t = w.reshape((2,) * n + (w.shape[1],))
    t = np.transpose(t, wires + rest + traced + [n])
    t = t.reshape(2 ** len(wires), 2 ** len(rest), 2 ** len(traced), w.shape[1])
    outcomes = list(itertools.product((0, 1), repeat=len(wires)))
    kraus = [[t[j, :, i, :] for i in range(t.shape[2])] for j in range(len(outcomes))]
    return InstrumentBranches(outcomes, kraus)


def instrument_distribution(c: Circuit, rho) -> tuple[list[float], list[np.ndarray]]:
    """Exact outcome probabilities and normalized post-measurement states.

    Outcomes are enumerated in big-endian order of the classical bits;
    zero-probability branches get a zero post-state.
    """
    rho = np.asarray(rho, dtype=complex)
    br = instrument_branches(c)
    probs, posts = [], []
    for state in br.branch_states(rho):
        p = float(np.trace(state).real)
        probs.append(p)
        posts.append(state / p if p > 1e-14 else np.zeros_like(state))
    return probs, posts
