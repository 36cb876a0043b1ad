"""Channels, POVMs and instruments, and their compilation through a dilation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, Measure, TraceOut
from .numerics import ValidationError, as_matrix, num_qubits_of, psd_pinv_sqrt, psd_sqrt
from .synthesis.dispatch import Method, synthesize
from .verify import circuit_choi, instrument_branches, kraus_choi

COMPLETENESS_TOL = 1e-8
RANK_TOL = 1e-10


def _completeness_defect(ops: Sequence[np.ndarray]) -> float:
    din = ops[0].shape[1]
    total = sum(a.conj().T @ a for a in ops)
    return float(np.linalg.norm(total - np.eye(din)))


def _operator_list(ops, what: str) -> tuple[np.ndarray, ...]:
    mats = tuple(as_matrix(a) for a in ops)
    if not mats:
        raise ValidationError(f"{what} needs at least one operator")
    shape = mats[0].shape
    for a in mats:
        if a.shape != shape:
            raise ValidationError(f"{what} operators have mixed shapes {shape} and {a.shape}")
    num_qubits_of(shape[0])
    num_qubits_of(shape[1])
    return mats


def _bits(count: int) -> int:
    """Qubits needed to index `count` items."""
    return max(0, math.ceil(math.log2(count))) if count > 1 else 0


@dataclass(frozen=True)
class Channel:
    """Kraus representation; validated for trace preservation on construction."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = _operator_list(self.kraus, "channel")
        object.__setattr__(self, "kraus", mats)
        d = _completeness_defect(mats)
        if d > COMPLETENESS_TOL:
            raise ValidationError(f"Kraus completeness defect {d:.3e} exceeds {COMPLETENESS_TOL:.0e}")

    @property
    def kraus_rank(self) -> int:
        return len(self.kraus)

    @property
    def input_qubits(self) -> int:
        return num_qubits_of(self.kraus[0].shape[1])

    @property
    def output_qubits(self) -> int:
        return num_qubits_of(self.kraus[0].shape[0])

    def apply(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        return sum(a @ rho @ a.conj().T for a in self.kraus)


@dataclass(frozen=True)
class ChoiState:
    """Unnormalized Choi matrix sum_ij |i><j| (x) E(|i><j|), input factor first."""

    matrix: np.ndarray
    input_dim: int

    @property
    def output_dim(self) -> int:
        return self.matrix.shape[0] // self.input_dim

    def partial_trace_output(self) -> np.ndarray:
        din, dout = self.input_dim, self.output_dim
        return np.einsum("iojo->ij", self.matrix.reshape(din, dout, din, dout))


@dataclass(frozen=True)
class Povm:
    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = _operator_list(self.effects, "POVM")
        object.__setattr__(self, "effects", mats)
        for e in mats:
            if e.shape[0] != e.shape[1]:
                raise ValidationError(f"POVM effect must be square, got {e.shape}")
            if np.linalg.norm(e - e.conj().T) > COMPLETENESS_TOL:
                raise ValidationError("POVM effect is not Hermitian")
            w = np.linalg.eigvalsh(0.5 * (e + e.conj().T))
            if w.min() < -COMPLETENESS_TOL or w.max() > 1 + COMPLETENESS_TOL:
                raise ValidationError(f"POVM effect spectrum [{w.min():.3e}, {w.max():.3e}] "
                                      "is outside [0, 1]")
        d = self.effect_sum_defect()
        if d > COMPLETENESS_TOL:
            raise ValidationError(f"POVM effects sum to identity only within {d:.3e}")

    @property
    def outcomes(self) -> int:
        return len(self.effects)

    def effect_sum_defect(self) -> float:
        return float(np.linalg.norm(sum(self.effects) - np.eye(self.effects[0].shape[0])))

    def probabilities(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        return np.array([np.trace(e @ rho).real for e in self.effects])


@dataclass(frozen=True)
class Instrument:
    """One list of Kraus operators per classical outcome."""

    branches: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        if not self.branches:
            raise ValidationError("instrument needs at least one branch")
        branches = tuple(_operator_list(b, "instrument branch") for b in self.branches)
        shapes = {b[0].shape for b in branches}
        if len(shapes) != 1:
            raise ValidationError(f"instrument branches have mixed shapes {sorted(shapes)}")
        object.__setattr__(self, "branches", branches)
        d = _completeness_defect([a for b in branches for a in b])
        if d > COMPLETENESS_TOL:
            raise ValidationError(f"instrument completeness defect {d:.3e} "
                                  f"exceeds {COMPLETENESS_TOL:.0e}")

    @property
    def outcomes(self) -> int:
        return len(self.branches)

    def branch_state(self, j: int, rho) -> np.ndarray:
        """Unnormalized post-measurement state for outcome j."""
        rho = as_matrix(rho)
        return sum(a @ rho @ a.conj().T for a in self.branches[j])


# ---------------------------------------------------------------------------
# Kraus <-> Choi
# ---------------------------------------------------------------------------

def kraus_to_choi(ch: Channel) -> ChoiState:
    return ChoiState(kraus_choi(ch.kraus), ch.kraus[0].shape[1])


def choi_to_kraus(cs: ChoiState, tol: float = RANK_TOL) -> Channel:
    """Kraus operators from the eigendecomposition of a Choi matrix."""
    j = as_matrix(cs.matrix)
    din = cs.input_dim
    if j.shape[0] != j.shape[1] or j.shape[0] % din:
        raise ValidationError(f"Choi matrix shape {j.shape} incompatible with input dim {din}")
    if np.linalg.norm(j - j.conj().T) > COMPLETENESS_TOL:
        raise ValidationError("Choi matrix is not Hermitian")
    dout = j.shape[0] // din
    w, vecs = np.linalg.eigh(0.5 * (j + j.conj().T))
    if w.min() < -COMPLETENESS_TOL:
        raise ValidationError(f"Choi matrix is not PSD (eigenvalue {w.min():.3e})")
    order = np.argsort(w)[::-1]
    kraus = [math.sqrt(w[k]) * vecs[:, k].reshape(din, dout).T for k in order if w[k] > tol]
    if not kraus:
        raise ValidationError("Choi matrix is zero")
    return Channel(tuple(kraus))


def choi_rank(cs: ChoiState, tol: float = RANK_TOL) -> int:
    return int(np.sum(np.linalg.eigvalsh(cs.matrix) > tol))


def minimize_kraus_rank(ch: Channel) -> Channel:
    """Equivalent channel with the fewest Kraus operators."""
    return choi_to_kraus(kraus_to_choi(ch))


# ---------------------------------------------------------------------------
# dilations and circuits
# ---------------------------------------------------------------------------

def stinespring_isometry(ch: Channel) -> np.ndarray:
    """V = sum_i |i>_env (x) A_i with the environment as the leading qubits.

    The operator list is padded with zeros to a power-of-two length.
    """
    k = _bits(ch.kraus_rank)
    dout, din = ch.kraus[0].shape
    blocks = list(ch.kraus) + [np.zeros((dout, din), dtype=complex)] * (2**k - ch.kraus_rank)
    return np.vstack(blocks)


def compile_channel(ch: Channel, method: Method = Method.AUTO, simplify_output: bool = True
                    ) -> tuple[Circuit, Method]:
    """Synthesized dilation followed by discarding the environment, and the method used."""
    k = _bits(ch.kraus_rank)
    circuit, report = synthesize(stinespring_isometry(ch), method, simplify_output)
    return circuit.with_gates(circuit.gates + tuple(TraceOut(q) for q in range(k))), report.method


def dec_channel(ch: Channel, simplify_output: bool = True) -> Circuit:
    return compile_channel(ch, Method.AUTO, simplify_output)[0]


def instrument_isometry(inst: Instrument) -> tuple[np.ndarray, int, int]:
    """Dilation sum_j sum_i |j>_out |i>_env (x) A^j_i.

    Returns the isometry with the number of outcome and environment qubits.
    """
    ell = _bits(inst.outcomes)
    k = _bits(max(len(b) for b in inst.branches))
    dout, din = inst.branches[0][0].shape
    zero = np.zeros((dout, din), dtype=complex)
    blocks = []
    for j in range(2**ell):
        ops = inst.branches[j] if j < inst.outcomes else ()
        blocks.extend(ops[i] if i < len(ops) else zero for i in range(2**k))
    return np.vstack(blocks), ell, k


def compile_instrument(inst: Instrument, method: Method = Method.AUTO,
                       simplify_output: bool = True) -> tuple[Circuit, Method]:
    """Outcome j is read big-endian from the leading qubits; the environment is discarded."""
    v, ell, k = instrument_isometry(inst)
    circuit, report = synthesize(v, method, simplify_output)
    tail = [Measure(q, q) for q in range(ell)]
    tail += [TraceOut(q) for q in range(ell, ell + k)]
    return circuit.with_gates(circuit.gates + tuple(tail)), report.method


def dec_instrument(inst: Instrument, simplify_output: bool = True) -> Circuit:
    return compile_instrument(inst, Method.AUTO, simplify_output)[0]


def compile_povm(p: Povm, method: Method = Method.AUTO, simplify_output: bool = True
                 ) -> tuple[Circuit, Method]:
    """Measure the instrument {{sqrt E_j}} and discard the post-measurement state."""
    inst = Instrument(tuple((psd_sqrt(e),) for e in p.effects))
    circuit, used = compile_instrument(inst, method, simplify_output)
    data = range(_bits(p.outcomes), circuit.num_qubits)
    return circuit.with_gates(circuit.gates + tuple(TraceOut(q) for q in data)), used


def dec_povm(p: Povm, simplify_output: bool = True) -> Circuit:
    return compile_povm(p, Method.AUTO, simplify_output)[0]


def pgm_effects(states: Sequence, probs: Sequence[float]) -> Povm:
    """Pretty-good measurement p_i s^{-1/2} rho_i s^{-1/2} with s = sum p_i rho_i.

    If s is singular a final effect covering its kernel is appended.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or len(p) != len(states) or len(p) == 0:
        raise ValidationError("need one probability per state")
    if p.min() < 0 or abs(p.sum() - 1) > COMPLETENESS_TOL:
        raise ValidationError("probabilities must be non-negative and sum to 1")
    rhos = [as_matrix(s) for s in states]
    for r in rhos:
        if abs(np.trace(r) - 1) > COMPLETENESS_TOL:
            raise ValidationError("states must have unit trace")
        if np.linalg.eigvalsh(0.5 * (r + r.conj().T)).min() < -COMPLETENESS_TOL:
            raise ValidationError("states must be positive semidefinite")
    avg = sum(pi * r for pi, r in zip(p, rhos))
    root = psd_pinv_sqrt(avg)
    effects = [pi * root @ r @ root for pi, r in zip(p, rhos)]
    effects = [0.5 * (e + e.conj().T) for e in effects]
    rest = np.eye(avg.shape[0]) - sum(effects)
    if np.linalg.norm(rest) > RANK_TOL:
        effects.append(0.5 * (rest + rest.conj().T))
    return Povm(tuple(effects))


# ---------------------------------------------------------------------------
# residuals of compiled circuits, through the simulator
# ---------------------------------------------------------------------------

def channel_residual(c: Circuit, ch: Channel) -> float:
    """Frobenius distance between the circuit's Choi matrix and the channel's."""
    return float(np.linalg.norm(circuit_choi(c) - kraus_to_choi(ch).matrix))


def instrument_residual(c: Circuit, inst: Instrument) -> float:
    """Choi distance summed in quadrature over outcomes; extra outcomes must vanish."""
    br = instrument_branches(c)
    total = 0.0
    for j, ops in enumerate(br.kraus):
        got = kraus_choi(ops)
        want = (kraus_choi(inst.branches[j]) if j < inst.outcomes
                else np.zeros_like(got))
        total += float(np.linalg.norm(got - want)) ** 2
    return math.sqrt(total)


def povm_residual(c: Circuit, p: Povm) -> float:
    """Distance between the circuit's effects and the requested ones."""
    effects = instrument_branches(c).effects()
    total = 0.0
    for j, e in enumerate(effects):
        want = p.effects[j] if j < p.outcomes else np.zeros_like(e)
        total += float(np.linalg.norm(e - want)) ** 2
    return math.sqrt(total)
