import math

import numpy as np
import pytest

from corpus import (AD_KRAUS, KET0, KET1, PGM_REFERENCE, PLUS, random_channel_kraus,
                    random_density)
from isosynth.channels import (Channel, ChoiState, Instrument, Povm, channel_residual, choi_rank,
                               choi_to_kraus, compile_channel, dec_channel, dec_instrument,
                               dec_povm, instrument_isometry, kraus_to_choi, minimize_kraus_rank,
                               pgm_effects, stinespring_isometry)
from isosynth.circuit import Measure, TraceOut, cnot_count
from isosynth.numerics import ValidationError, psd_sqrt
from isosynth.synthesis.dispatch import Method
from isosynth.verify import circuit_choi, instrument_distribution

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1, -1]).astype(complex)
I2 = np.eye(2, dtype=complex)


# representations -----------------------------------------------------------

def test_identity_choi():
    phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert np.allclose(kraus_to_choi(Channel((I2,))).matrix, 2 * np.outer(phi, phi))


def test_depolarizing_choi():
    ch = Channel((X / 2, Y / 2, Z / 2, I2 / 2))
    assert np.allclose(kraus_to_choi(ch).matrix, np.eye(4) / 2)
    assert choi_rank(kraus_to_choi(ch)) == 4


def test_damping_round_trip_acts_the_same():
    ch = Channel(AD_KRAUS)
    back = choi_to_kraus(kraus_to_choi(ch))
    rng = np.random.default_rng(0)
    for _ in range(10):
        rho = random_density(rng, 2)
        assert np.linalg.norm(back.apply(rho) - ch.apply(rho)) <= 1e-10


def test_choi_partial_trace_is_identity():
    cs = kraus_to_choi(Channel(AD_KRAUS))
    assert np.allclose(cs.partial_trace_output(), np.eye(2))


def test_choi_to_kraus_rejects_bad_input():
    with pytest.raises(ValidationError):
        choi_to_kraus(ChoiState(np.diag([1.0, -1.0, 0, 0]), 2))


def test_minimize_duplicate_identity():
    ch = minimize_kraus_rank(Channel((I2 / math.sqrt(2), I2 / math.sqrt(2))))
    assert ch.kraus_rank == 1
    assert np.allclose(ch.kraus[0].conj().T @ ch.kraus[0], I2)
    # the single operator is the identity up to phase
    a = ch.kraus[0]
    assert np.allclose(a / a[0, 0], I2)


def test_minimize_keeps_damping_rank():
    assert minimize_kraus_rank(Channel(AD_KRAUS)).kraus_rank == 2


def test_one_qubit_rank_at_most_four():
    rng = np.random.default_rng(1)
    for rank in range(1, 7):
        ch = minimize_kraus_rank(Channel(tuple(random_channel_kraus(rng, 2, 2, rank))))
        assert ch.kraus_rank <= 4


def test_channel_validation():
    with pytest.raises(ValidationError):
        Channel((2 * I2,))
    with pytest.raises(ValidationError):
        Channel((np.eye(3),))


# dilations -----------------------------------------------------------------

def test_unitary_dilation_is_itself():
    u = np.array([[0, 1j], [1j, 0]])
    assert np.allclose(stinespring_isometry(Channel((u,))), u)


def test_damping_dilation_stacks_operators():
    v = stinespring_isometry(Channel(AD_KRAUS))
    assert v.shape == (4, 2)
    assert np.allclose(v[:2], AD_KRAUS[0])
    assert np.allclose(v[2:], AD_KRAUS[1])


def test_rank_three_is_padded():
    rng = np.random.default_rng(2)
    v = stinespring_isometry(Channel(tuple(random_channel_kraus(rng, 2, 2, 3))))
    assert v.shape == (8, 2)
    assert np.all(v[6:] == 0)


def test_identity_channel_circuit():
    c = dec_channel(Channel((I2,)))
    assert cnot_count(c) == 0
    assert channel_residual(c, Channel((I2,))) <= 1e-8


def test_damping_circuit():
    c = dec_channel(Channel(AD_KRAUS))
    assert c.num_qubits == 2
    assert cnot_count(c) <= 2
    assert len(c.traced_qubits) == 1
    assert channel_residual(c, Channel(AD_KRAUS)) <= 1e-8


@pytest.mark.parametrize("seed", range(10))
def test_random_rank_two_channel(seed):
    ch = Channel(tuple(random_channel_kraus(np.random.default_rng(seed), 2, 2, 2)))
    assert channel_residual(dec_channel(ch), ch) <= 1e-8


@pytest.mark.parametrize("din,dout,rank", [(2, 2, 4), (4, 4, 2), (2, 4, 3), (4, 2, 2)])
def test_random_channel_corpus(din, dout, rank):
    rng = np.random.default_rng(din * 100 + dout * 10 + rank)
    for _ in range(3):
        ch = Channel(tuple(random_channel_kraus(rng, din, dout, rank)))
        c, _ = compile_channel(ch, Method.AUTO)
        assert np.linalg.norm(circuit_choi(c) - kraus_to_choi(ch).matrix) <= 1e-8


# instruments and POVMs -----------------------------------------------------

def test_single_branch_instrument_matches_channel():
    inst = Instrument((AD_KRAUS,))
    c = dec_instrument(inst)
    assert not c.measured_qubits
    assert np.allclose(circuit_choi(c), circuit_choi(dec_channel(Channel(AD_KRAUS))))


def test_projective_instrument():
    c = dec_instrument(Instrument(((KET0,), (KET1,))))
    psi = np.array([0.6, 0.8j])
    probs, _ = instrument_distribution(c, np.outer(psi, psi.conj()))
    assert probs == pytest.approx([0.36, 0.64])


def test_instrument_layout():
    inst = Instrument(((np.sqrt(0.5) * I2,), (np.sqrt(0.25) * X, np.sqrt(0.25) * Z)))
    v, ell, k = instrument_isometry(inst)
    assert (ell, k) == (1, 1)
    assert v.shape == (8, 2)
    assert np.allclose(v[2:4], 0)
    c = dec_instrument(inst)
    assert Measure(0, 0) in c.gates and TraceOut(1) in c.gates


def test_instrument_post_states():
    rng = np.random.default_rng(5)
    a = random_channel_kraus(rng, 2, 2, 3)
    inst = Instrument(((a[0],), (a[1], a[2])))
    c = dec_instrument(inst)
    for _ in range(10):
        rho = random_density(rng, 2)
        probs, posts = instrument_distribution(c, rho)
        assert abs(sum(probs) - 1) <= 1e-10
        for j in range(2):
            assert np.linalg.norm(probs[j] * posts[j] - inst.branch_state(j, rho)) <= 1e-8


def test_instrument_validation():
    with pytest.raises(ValidationError):
        Instrument(((I2,), (X,)))


def test_basis_povm():
    c = dec_povm(Povm((KET0, KET1)))
    psi = np.array([0.8, -0.6])
    probs, _ = instrument_distribution(c, np.outer(psi, psi))
    assert probs == pytest.approx([0.64, 0.36])


def test_sqrt_instrument_of_reference_effects():
    inst = Instrument(tuple((psd_sqrt(e),) for e in PGM_REFERENCE))
    c = dec_instrument(inst)
    rng = np.random.default_rng(6)
    for _ in range(10):
        rho = random_density(rng, 2)
        probs, _ = instrument_distribution(c, rho)
        want = [np.trace(e @ rho).real for e in PGM_REFERENCE]
        assert np.allclose(probs[:3], want, atol=1e-8)


def test_reference_pgm_circuit():
    c = dec_povm(Povm(PGM_REFERENCE))
    assert c.num_qubits == 3
    probs, _ = instrument_distribution(c, KET0)
    assert probs[3] <= 1e-10
    assert probs[:3] == pytest.approx([0.25, (3 + 2 * math.sqrt(2)) / 8,
                                       (3 - 2 * math.sqrt(2)) / 8], abs=1e-8)


def test_pgm_of_orthogonal_states():
    p = pgm_effects([KET0, KET1], [0.5, 0.5])
    assert p.outcomes == 2
    assert np.allclose(p.effects[0], KET0) and np.allclose(p.effects[1], KET1)


def test_pgm_reproduces_reference_effects():
    # the first reference effect belongs to |+>
    p = pgm_effects([PLUS, KET0, KET1], [1 / 3] * 3)
    assert p.outcomes == 3
    for got, want in zip(p.effects, PGM_REFERENCE):
        assert np.linalg.norm(got - want) <= 1e-8


def test_pgm_single_state_is_support_projector():
    p = pgm_effects([PLUS], [1.0])
    assert np.allclose(p.effects[0], PLUS)
    assert np.allclose(sum(p.effects), I2)


def test_povm_validation():
    with pytest.raises(ValidationError):
        Povm((KET0,))
    with pytest.raises(ValidationError):
        Povm((2 * KET0, KET1 - KET0))
    assert Povm(PGM_REFERENCE).effect_sum_defect() <= 1e-12
