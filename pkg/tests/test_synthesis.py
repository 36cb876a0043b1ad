import math

import numpy as np
import pytest
from scipy.linalg import block_diag
from scipy.stats import unitary_group

from isosynth.circuit import (CNOT_MATRIX, CNot, Circuit, RotY, RotZ, circuit_isometry,
                              circuit_matrix, cnot_count, ry, rz)
from isosynth.simplify import simplify
from isosynth.synthesis.dispatch import (Method, candidate_methods, dec_isometry,
                                         dec_isometry_generic, run_method, synthesize)
from isosynth.synthesis.isometry import (householder, householder_plan, knill, knill_spectrum, qsd,
                                         qsd_cnot_ceiling, qsd_isometry, random_isometry,
                                         state_prep_schmidt)
from isosynth.synthesis.multiplexor import demultiplex_rotation, diagonal_gates
from isosynth.synthesis.two_qubit import two_qubit_unitary
from isosynth.verify import phase_invariant_distance


def _residual(c: Circuit, v) -> float:
    return phase_invariant_distance(circuit_isometry(c), v)


# multiplexed rotations -----------------------------------------------------

def test_multiplexor_without_controls():
    assert demultiplex_rotation([0.4], "y", [], 0) == [RotY(0.4, 0)]


def test_multiplexor_equal_angles():
    gates = demultiplex_rotation([0.5, 0.5], "z", [0], 1)
    assert gates == [RotZ(0.5, 1), CNot(0, 1), RotZ(0.0, 1), CNot(0, 1)]


@pytest.mark.parametrize("axis", ["y", "z"])
def test_multiplexor_two_controls(axis):
    rng = np.random.default_rng(7)
    angles = rng.uniform(-3, 3, 4)
    gates = demultiplex_rotation(angles, axis, [0, 1], 2)
    rot = ry if axis == "y" else rz
    target = block_diag(*[rot(a) for a in angles])
    assert np.linalg.norm(circuit_matrix(Circuit(3, tuple(gates))) - target) <= 1e-10
    assert sum(isinstance(g, CNot) for g in gates) == 4


def test_diagonal_gates():
    phases = np.array([0.1, -0.7, 2.0, 0.3, 1.1, -2.2, 0.0, 0.9])
    c = Circuit(3, tuple(diagonal_gates(phases, [0, 1, 2])))
    assert phase_invariant_distance(circuit_matrix(c), np.diag(np.exp(1j * phases))) <= 1e-10


# two-qubit unitaries ---------------------------------------------------------

def test_two_qubit_local():
    u = np.kron(unitary_group.rvs(2, random_state=1), unitary_group.rvs(2, random_state=2))
    c = two_qubit_unitary(u)
    assert cnot_count(c) == 0
    assert phase_invariant_distance(circuit_matrix(c), u) <= 1e-9


def test_two_qubit_cnot():
    c = two_qubit_unitary(CNOT_MATRIX)
    assert cnot_count(c) == 1
    assert phase_invariant_distance(circuit_matrix(c), CNOT_MATRIX) <= 1e-9


@pytest.mark.parametrize("seed", range(20))
def test_two_qubit_random(seed):
    u = unitary_group.rvs(4, random_state=seed)
    c = two_qubit_unitary(u)
    assert cnot_count(c) == 3
    assert phase_invariant_distance(circuit_matrix(c), u) <= 1e-9


def test_two_qubit_two_cnot_class():
    # a product of two CNOTs with locals in between needs only two
    a = np.kron(unitary_group.rvs(2, random_state=3), unitary_group.rvs(2, random_state=4))
    u = CNOT_MATRIX @ a @ CNOT_MATRIX
    c = two_qubit_unitary(u)
    assert cnot_count(c) <= 2
    assert phase_invariant_distance(circuit_matrix(c), u) <= 1e-9


# quantum Shannon decomposition ---------------------------------------------

def test_qsd_single_qubit():
    u = unitary_group.rvs(2, random_state=0)
    c = qsd(u)
    assert cnot_count(c) == 0
    assert phase_invariant_distance(circuit_matrix(c), u) <= 1e-9


@pytest.mark.parametrize("n,ceiling", [(1, 0), (2, 3), (3, 24), (4, 120)])
def test_qsd_ceiling_values(n, ceiling):
    assert qsd_cnot_ceiling(n) == ceiling


@pytest.mark.parametrize("seed", range(5))
def test_qsd_three_qubits(seed):
    u = unitary_group.rvs(8, random_state=seed)
    c = qsd(u)
    assert cnot_count(c) <= 24
    assert phase_invariant_distance(circuit_matrix(c), u) <= 1e-9


def test_qsd_isometry_cases():
    zero = np.eye(8, 1)
    assert _residual(qsd_isometry(zero), zero) <= 1e-8
    v = random_isometry(1, 2, seed=3)
    assert _residual(qsd_isometry(v), v) <= 1e-8
    u = unitary_group.rvs(4, random_state=5)
    assert qsd_isometry(u).gates == qsd(u).gates


# state preparation ---------------------------------------------------------

def test_state_prep_zero_state():
    assert simplify(state_prep_schmidt(np.eye(16, 1))).gates == ()


def test_state_prep_bell():
    bell = np.array([[1], [0], [0], [1]]) / math.sqrt(2)
    c = simplify(state_prep_schmidt(bell))
    assert cnot_count(c) == 1
    assert _residual(c, bell) <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_state_prep_four_qubits(seed):
    psi = random_isometry(0, 4, seed=seed)
    c = simplify(state_prep_schmidt(psi))
    assert cnot_count(c) <= 16
    assert _residual(c, psi) <= 1e-8


# Knill ---------------------------------------------------------------------

def test_knill_identity_columns():
    spec = knill_spectrum(np.eye(8, 2))
    assert spec.t == 0
    assert knill(np.eye(8, 2)).gates == ()


def test_knill_single_phase():
    u = np.diag([np.exp(0.9j), 1, 1, 1])
    spec = knill_spectrum(u)
    assert spec.t == 1
    assert spec.thetas[0] == pytest.approx(0.9)
    assert np.allclose(np.abs(spec.vectors[:, 0]), [1, 0, 0, 0])


@pytest.mark.parametrize("seed", range(5))
def test_knill_one_to_three(seed):
    v = random_isometry(1, 3, seed=seed)
    spec = knill_spectrum(v)
    assert spec.t <= 2
    assert np.linalg.norm(spec.product() - spec.unitary) <= 1e-10
    assert _residual(knill(v), v) <= 1e-8


# Householder ---------------------------------------------------------------

def test_householder_phase_flip_gate():
    c = Circuit(2, tuple(diagonal_gates([math.pi, 0, 0, 0], [0, 1])))
    assert phase_invariant_distance(circuit_matrix(c), np.diag([-1, 1, 1, 1])) <= 1e-12


def test_householder_skips_fixed_column():
    v = np.zeros((8, 2), dtype=complex)
    v[0, 0] = 1
    v[3, 1] = v[5, 1] = 1 / math.sqrt(2)
    plan = householder_plan(v)
    assert plan.normals[0] is None
    assert plan.normals[1] is not None
    assert _residual(householder(v), v) <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_householder_two_to_three(seed):
    v = random_isometry(2, 3, seed=seed)
    plan = householder_plan(v)
    for j, stage in enumerate(plan.stages):
        for i in range(j + 1):
            # column i sits on basis state i and later reflections leave it alone
            assert np.linalg.norm(np.delete(stage[:, i], i)) <= 1e-10
            assert np.allclose(stage[:, i], plan.stages[-1][:, i], atol=1e-10)
    assert _residual(householder(v), v) <= 1e-8


# dispatch ------------------------------------------------------------------

def test_dec_isometry_bell():
    bell = np.array([[1], [0], [0], [1]]) / math.sqrt(2)
    c, report = dec_isometry(bell)
    assert report.cnots == cnot_count(c) == 1
    assert report.method in (Method.QSD, Method.STATEPREP)


def test_single_qubit_has_no_cnots():
    u = unitary_group.rvs(2, random_state=9)
    for method in (Method.QSD, Method.KNILL, Method.HOUSEHOLDER):
        c, _ = run_method(u, method)
        assert cnot_count(c) == 0


def test_dec_isometry_is_best_candidate():
    v = random_isometry(1, 3, seed=2)
    c, report = dec_isometry(v)
    counts = {m: run_method(v, m)[1].cnots for m in candidate_methods(v)}
    assert report.cnots == min(counts.values())
    assert report.residual <= 1e-8


@pytest.mark.parametrize("m,n,method", [(2, 2, Method.QSD), (0, 3, Method.STATEPREP),
                                        (1, 3, Method.HOUSEHOLDER), (1, 2, Method.QSD)])
def test_generic_dispatch(m, n, method):
    _, report = dec_isometry_generic(random_isometry(m, n, seed=0))
    assert report.method is method


def test_state_prep_needs_state():
    with pytest.raises(ValueError):
        synthesize(random_isometry(1, 2, seed=0), Method.STATEPREP)


def test_random_isometry_shapes():
    v = random_isometry(0, 1, seed=1)
    assert v.shape == (2, 1) and abs(np.linalg.norm(v) - 1) <= 1e-12
    u = random_isometry(1, 1, seed=1)
    assert np.linalg.norm(u.conj().T @ u - np.eye(2)) <= 1e-12
    w = random_isometry(2, 3, seed=1)
    assert w.shape == (8, 4)
    assert np.linalg.norm(w.conj().T @ w - np.eye(4)) <= 1e-10
    assert np.array_equal(random_isometry(2, 3, seed=1), w)
