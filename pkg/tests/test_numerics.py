import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from isosynth.circuit import rx, rz
from isosynth.numerics import (ValidationError, axis_decompose, check_isometry,
                               cosine_sine_decompose, nullspace_basis, psd_sqrt, r_rx_decompose,
                               schmidt_decompose, unitary_eig, unitary_extension_max_unit_eigs,
                               unitary_from_matching_gram)
from isosynth.synthesis.isometry import isometry_dims, random_isometry

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _unit_eig_count(u, tol=1e-8):
    return int(np.sum(np.abs(np.linalg.eigvals(u) - 1) > tol))


def test_zyz_identity():
    f = axis_decompose(np.eye(2))
    assert (f.alpha, f.beta, f.gamma, f.delta) == (0, 0, 0, 0)


def test_zyz_pure_z_rotation():
    f = axis_decompose(rz(0.8))
    assert f.alpha == pytest.approx(0, abs=1e-15)
    assert f.beta == pytest.approx(0.8)
    assert (f.gamma, f.delta) == (0, 0)


def test_zyz_hadamard():
    f = axis_decompose(H)
    assert (f.alpha, f.beta, f.gamma, f.delta) == pytest.approx((math.pi / 2, -math.pi, math.pi / 2, 0),
                                                                 abs=1e-12)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["ZYZ", "XYX"]))
def test_axis_decompose_reconstructs(seed, axes):
    u = unitary_group.rvs(2, random_state=seed)
    assert np.linalg.norm(axis_decompose(u, axes).matrix() - u) <= 1e-12


def test_axis_decompose_rejects_non_unitary():
    with pytest.raises(ValidationError):
        axis_decompose(np.diag([1, 2]))


def test_r_rx_identity_and_rx():
    f = r_rx_decompose(np.eye(2))
    assert (f.theta, f.phi, f.delta) == (0, 0, 0)
    f = r_rx_decompose(rx(0.6))
    assert f.theta == 0
    assert f.delta == pytest.approx(0.6)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_r_rx_reconstructs(seed):
    u = unitary_group.rvs(2, random_state=seed)
    assert np.linalg.norm(r_rx_decompose(u).matrix() - u) <= 1e-12
    assert np.linalg.norm(r_rx_decompose(H).matrix() - H) <= 1e-12


def test_schmidt_product_and_bell():
    s = schmidt_decompose(np.array([1, 0, 0, 0]), 1)
    assert s.rank == 1
    assert np.allclose(s.coefficients[0], 1)
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert np.allclose(schmidt_decompose(bell, 1).coefficients, [1 / math.sqrt(2)] * 2)


def test_schmidt_random_four_qubit():
    psi = random_isometry(0, 4, seed=11)
    s = schmidt_decompose(psi, 2)
    assert np.sum(s.coefficients**2) == pytest.approx(1, abs=1e-12)
    assert np.linalg.norm(s.state() - psi) <= 1e-10


def test_csd_block_diagonal():
    a, b = unitary_group.rvs(2, random_state=1), unitary_group.rvs(2, random_state=2)
    u = np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), b]])
    f = cosine_sine_decompose(u)
    assert np.allclose(f.angles, 0, atol=1e-12)
    assert np.linalg.norm(f.matrix() - u) <= 1e-12


def test_csd_known_angle():
    t = 0.37
    c, s = math.cos(t) * np.eye(2), math.sin(t) * np.eye(2)
    u = np.block([[c, -s], [s, c]])
    f = cosine_sine_decompose(u)
    assert np.allclose(f.angles, [t, t])
    assert np.linalg.norm(f.matrix() - u) <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_csd_random_eight(seed):
    u = unitary_group.rvs(8, random_state=seed)
    assert np.linalg.norm(cosine_sine_decompose(u).matrix() - u) <= 1e-10


def test_nullspace_psd_sqrt_eig():
    assert np.allclose(nullspace_basis([[1, 0]]), [[0], [1]])
    assert np.allclose(psd_sqrt(np.diag([4, 0])), np.diag([2, 0]))
    w, vecs = unitary_eig(rz(math.pi))
    assert np.allclose(w, [1j, -1j])
    assert np.allclose(np.abs(vecs), np.eye(2))


def test_psd_sqrt_rejects_negative():
    with pytest.raises(ValidationError):
        psd_sqrt(np.diag([1, -1]))


def test_matching_gram_identity_and_zero_column():
    x = np.eye(4, 2)
    u = unitary_from_matching_gram(x, x)
    assert np.allclose(u @ x, x)
    x = np.zeros((3, 2), dtype=complex)
    x[0, 0] = 1
    y = np.zeros((3, 2), dtype=complex)
    y[2, 0] = 1j
    u = unitary_from_matching_gram(x, y)
    assert np.allclose(u @ x, y)
    assert np.allclose(u.conj().T @ u, np.eye(3))


@pytest.mark.parametrize("seed", range(10))
def test_matching_gram_random(seed):
    rng = np.random.default_rng(seed)
    q = unitary_group.rvs(6, random_state=seed)
    x = rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3))
    u = unitary_from_matching_gram(x, q @ x)
    assert np.linalg.norm(u @ x - q @ x) <= 1e-8
    assert np.linalg.norm(u.conj().T @ u - np.eye(6)) <= 1e-10


def test_matching_gram_rejects_mismatch():
    with pytest.raises(ValidationError):
        unitary_from_matching_gram(np.eye(2, 1), 2 * np.eye(2, 1))


def test_extension_of_identity_columns():
    assert np.allclose(unitary_extension_max_unit_eigs(np.eye(8, 2)), np.eye(8))


def test_extension_two_by_one():
    v = np.array([[0.6j], [0.8]])
    u = unitary_extension_max_unit_eigs(v)
    assert np.allclose(u[:, :1], v)
    assert _unit_eig_count(u) <= 1


@pytest.mark.parametrize("seed", range(10))
def test_extension_random(seed):
    v = random_isometry(1, 3, seed=seed)
    u = unitary_extension_max_unit_eigs(v)
    assert np.linalg.norm(u[:, :2] - v) <= 1e-8
    assert np.linalg.norm(u.conj().T @ u - np.eye(8)) <= 1e-10
    assert _unit_eig_count(u) <= 2


def test_check_isometry():
    check_isometry(np.eye(4, 2))
    with pytest.raises(ValidationError):
        check_isometry(np.ones((4, 2)))
    with pytest.raises(ValidationError):
        check_isometry(np.eye(2, 3))
    with pytest.raises(ValidationError):
        isometry_dims(np.eye(3, 2))
