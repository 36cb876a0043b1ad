import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_circuit
from isosynth.circuit import (CNOT_MATRIX, CNot, Circuit, CircuitError, Measure, RGate, RotX,
                              RotY, RotZ, TraceOut, XXGate, circuit_matrix, cnot_count,
                              gate_matrix, xx_matrix)
from isosynth.ion import (cnot_as_xx, cnot_to_xx_circuit, ion_merge, ion_normal_form_violations,
                          r_as_rotations, xx_to_cnot_circuit)
from isosynth.verify import phase_invariant_distance


def _xx_count(c: Circuit) -> int:
    return sum(isinstance(g, XXGate) for g in c.gates)


def _dist(a: Circuit, b: Circuit) -> float:
    return phase_invariant_distance(circuit_matrix(a), circuit_matrix(b))


def test_single_cnot_pattern():
    c = cnot_to_xx_circuit(Circuit(2, (CNot(0, 1),)), merge=False)
    assert c.gates == (RotY(-math.pi / 2, 0), XXGate(math.pi / 4, 0, 1), RotX(math.pi / 2, 0),
                       RotY(math.pi / 2, 0), RotX(math.pi / 2, 1))
    assert phase_invariant_distance(circuit_matrix(c), CNOT_MATRIX) <= 1e-12


def test_reversed_cnot_pattern():
    gates = cnot_as_xx(CNot(1, 0))
    c = Circuit(2, tuple(gates))
    assert _dist(c, Circuit(2, (CNot(1, 0),))) <= 1e-12


def test_empty_circuit():
    assert cnot_to_xx_circuit(Circuit(3)).gates == ()


@pytest.mark.parametrize("seed", range(10))
def test_random_three_qubit(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, 3, 20)
    while cnot_count(c) != 6:
        c = random_circuit(rng, 3, 15)
    out = cnot_to_xx_circuit(c)
    assert _xx_count(out) == 6
    assert _dist(c, out) <= 1e-10
    assert ion_normal_form_violations(out) == []


def test_xx_commutes_with_rx():
    xx = XXGate(0.7, 0, 1)
    c = Circuit(2, (xx, RotX(0.3, 0), RotX(-1.1, 1)))
    out = ion_merge(c)
    assert out.gates[-1] == xx
    assert all(isinstance(g, RotX) for g in out.gates[:-1])
    assert _dist(c, out) <= 1e-12


def test_single_qubit_only_merge():
    c = Circuit(2, (RotY(0.3, 0), RotZ(1.2, 0), RotX(0.5, 0), RotZ(-0.4, 1), RotY(2.0, 1)))
    out = ion_merge(c)
    assert ion_normal_form_violations(out) == []
    for w in range(2):
        assert sum(isinstance(g, RGate) and g.target == w for g in out.gates) <= 1
    assert _dist(c, out) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_two_qubit_merge(seed):
    c = random_circuit(np.random.default_rng(seed), 2, 25)
    out = cnot_to_xx_circuit(c)
    assert ion_normal_form_violations(out) == []
    assert _xx_count(out) == cnot_count(c)
    assert _dist(c, out) <= 1e-10


def test_xx_back_to_cnots():
    c = xx_to_cnot_circuit(Circuit(2, (XXGate(math.pi / 4, 0, 1),)))
    assert phase_invariant_distance(circuit_matrix(c), xx_matrix(math.pi / 4)) <= 1e-12


def test_r_gate_as_rx():
    assert r_as_rotations(RGate(-0.9, 0.0, 0)) == [RotX(0.9, 0)]


@pytest.mark.parametrize("phi", [0.0, math.pi / 2, math.pi, -math.pi / 2, 0.37, -2.5])
def test_r_as_rotations(phi):
    g = RGate(1.3, phi, 0)
    c = Circuit(1, tuple(r_as_rotations(g)))
    assert phase_invariant_distance(circuit_matrix(c), gate_matrix(g)) <= 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_round_trip(seed):
    c = random_circuit(np.random.default_rng(seed), 3, 30)
    back = xx_to_cnot_circuit(cnot_to_xx_circuit(c))
    assert _dist(c, back) <= 1e-10


def test_measure_and_trace_move_to_the_end():
    c = Circuit(2, (CNot(0, 1), Measure(0), RotX(0.4, 1), TraceOut(1)))
    out = cnot_to_xx_circuit(c)
    assert out.gates[-2:] == (Measure(0), TraceOut(1))
    with pytest.raises(CircuitError):
        cnot_to_xx_circuit(Circuit(2, (Measure(0), CNot(0, 1))))


def test_violations_are_reported():
    bad = Circuit(2, (XXGate(0.2, 0, 1), RGate(0.1, 0.2, 0), RGate(0.3, 0.4, 0)))
    assert ion_normal_form_violations(bad)
    assert ion_normal_form_violations(Circuit(2, (CNot(0, 1),)))
