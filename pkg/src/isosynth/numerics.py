"""Dense linear-algebra kernels used by the synthesis routines."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .circuit import canonical_angle, r_matrix, rx, ry, rz


class ValidationError(ValueError):
    """Input violates a numerical precondition (unitarity, normalization, ...)."""


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------

def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValidationError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains NaN or Inf")
    return m


def isometry_defect(v: np.ndarray) -> float:
    return float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])))


def check_isometry(v, tol: float = 1e-8, what: str = "isometry") -> np.ndarray:
    v = as_matrix(v)
    if v.shape[1] > v.shape[0]:
        raise ValidationError(f"{what} has more columns than rows: {v.shape}")
    d = isometry_defect(v)
    if d > tol:
        raise ValidationError(f"{what} defect ||V^dag V - 1|| = {d:.3e} exceeds {tol:.1e}")
    return v


def check_unitary(u, tol: float = 1e-8) -> np.ndarray:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise ValidationError(f"unitary must be square, got {u.shape}")
    return check_isometry(u, tol, "unitary")


def num_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValidationError(f"dimension {dim} is not a power of two")
    return n


# ---------------------------------------------------------------------------
# single-qubit factorizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZyzFactors:
    """u = e^{i alpha} A(beta) B(gamma) A(delta) for the tagged axes."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    axes: str = "ZYZ"

    def matrix(self) -> np.ndarray:
        outer = rz if self.axes == "ZYZ" else rx
        return np.exp(1j * self.alpha) * outer(self.beta) @ ry(self.gamma) @ outer(self.delta)


@dataclass(frozen=True)
class RRxFactors:
    """u = e^{i alpha} R(theta, phi) Rx(delta)."""

    alpha: float
    theta: float
    phi: float
    delta: float

    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.alpha) * r_matrix(self.theta, self.phi) @ rx(self.delta)


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

# below this the middle rotation is treated as exactly zero (or pi)
_DEGENERATE = 1e-13


def _outer_cost(beta: float, delta: float) -> float:
    return abs(math.remainder(beta, 2 * math.pi)) + abs(math.remainder(delta, 2 * math.pi))


def _zyz(u: np.ndarray) -> tuple[float, float, float, float]:
    u00, u01, u10, u11 = (complex(x) for x in u.ravel())
    alpha = 0.5 * cmath.phase(u00 * u11 - u01 * u10)
    rot = cmath.exp(-1j * alpha)
    v00, v01 = u00 * rot, u01 * rot
    a, b = abs(v00), abs(v01)
    if b <= _DEGENERATE:
        return alpha, 2.0 * cmath.phase(v00), 0.0, 0.0
    if a <= _DEGENERATE:
        beta, gamma, delta = 2.0 * cmath.phase(v01), math.pi, 0.0
    else:
        p = cmath.phase(v00)  # (beta + delta) / 2
        q = cmath.phase(v01)  # (beta - delta) / 2
        beta, gamma, delta = p + q, 2.0 * math.atan2(b, a), p - q
    # Rz(b) Ry(g) Rz(d) = Rz(b - pi) Ry(-g) Rz(d + pi) exactly; keep the
    # variant whose outer angles are closer to zero
    if _outer_cost(beta - math.pi, delta + math.pi) < _outer_cost(beta, delta) - 1e-12:
        beta, gamma, delta = beta - math.pi, -gamma, delta + math.pi
    return alpha, beta, gamma, delta


def euler_angles(u: np.ndarray, axes: str = "ZYZ") -> tuple[float, float, float, float]:
    """Unvalidated (alpha, beta, gamma, delta) for a 2x2 unitary."""
    if axes == "ZYZ":
        return _zyz(u)
    if axes == "XYX":
        # H Rz(t) H = Rx(t) and H Ry(t) H = Ry(-t)
        a, b, g, d = _zyz(_H @ u @ _H)
        return a, b, -g, d
    raise ValueError(f"unknown axes {axes!r}")


def axis_decompose(u, axes: str = "ZYZ") -> ZyzFactors:
    """Euler factorization of a 2x2 unitary along ZYZ or XYX axes."""
    u = check_unitary(u)
    if u.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 unitary, got {u.shape}")
    axes = axes.upper()
    a, b, g, d = euler_angles(u, axes)
    return ZyzFactors(a, canonical_angle(b), canonical_angle(g), canonical_angle(d), axes)


def r_rx_decompose(u) -> RRxFactors:
    """Factor u as e^{i alpha} R(theta, phi) Rx(delta).

    Starting from u = e^{i alpha} Rx(b) Ry(g) Rx(d), the palindrome
    K = Rx(b) Ry(g) Rx(b) has real equal diagonal entries, hence is an R gate,
    and u = e^{i alpha} K Rx(d - b).
    """
    f = axis_decompose(u, "XYX")
    if abs(f.gamma) <= _DEGENERATE:
        return RRxFactors(f.alpha, 0.0, 0.0, canonical_angle(f.beta + f.delta))
    k = rx(f.beta) @ ry(f.gamma) @ rx(f.beta)
    theta = 2.0 * math.atan2(abs(k[1, 0]), k[0, 0].real)
    phi = float(np.angle(1j * k[1, 0]))
    return RRxFactors(f.alpha, canonical_angle(theta), canonical_angle(phi),
                      canonical_angle(f.delta - f.beta))


# ---------------------------------------------------------------------------
# Schmidt and cosine-sine decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.sum(self.coefficients > 1e-12))

    def state(self) -> np.ndarray:
        out = sum(s * np.kron(self.left_basis[:, i], self.right_basis[:, i])
                  for i, s in enumerate(self.coefficients))
        return np.asarray(out).reshape(-1, 1)


def schmidt_decompose(state, split: int) -> SchmidtData:
    """Schmidt decomposition with the first factor on qubits 0..split-1."""
    psi = as_matrix(state).reshape(-1)
    n = num_qubits_of(psi.size)
    if not 1 <= split <= n - 1:
        raise ValidationError(f"split {split} outside 1..{n - 1}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > 1e-10:
        raise ValidationError(f"state norm {norm:.12f} is not 1")
    w, s, vh = np.linalg.svd(psi.reshape(2**split, 2 ** (n - split)))
    return SchmidtData(s, w[:, : s.size], vh[: s.size].T)


@dataclass(frozen=True)
class CsdFactors:
    left_blocks: tuple[np.ndarray, np.ndarray]
    angles: np.ndarray
    right_blocks: tuple[np.ndarray, np.ndarray]

    def matrix(self) -> np.ndarray:
        c, s = np.diag(np.cos(self.angles)), np.diag(np.sin(self.angles))
        cs = np.block([[c, -s], [s, c]])
        return (sla.block_diag(*self.left_blocks) @ cs
                @ sla.block_diag(*self.right_blocks))


def cosine_sine_decompose(u) -> CsdFactors:
    """u = (L1 + L2) CS (R1 + R2) with CS = [[C, -S], [S, C]], angles in [0, pi/2]."""
    u = check_unitary(u)
    dim = u.shape[0]
    if dim % 2:
        raise ValidationError(f"cosine-sine decomposition needs even dimension, got {dim}")
    half = dim // 2
    (l1, l2), theta, (r1, r2) = sla.cossin(u, p=half, q=half, separate=True)
    return CsdFactors((l1, l2), np.asarray(theta, dtype=float), (r1, r2))


# ---------------------------------------------------------------------------
# spaces, roots and spectra
# ---------------------------------------------------------------------------

def nullspace_basis(a, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the kernel of a, as columns."""
    a = as_matrix(a)
    if a.shape[0] == 0:
        return np.eye(a.shape[1], dtype=complex)
    return sla.null_space(a, rcond=tol).astype(complex)


def orthonormal_complement(v: np.ndarray) -> np.ndarray:
    """Columns spanning the orthogonal complement of range(v)."""
    return nullspace_basis(v.conj().T)


def psd_sqrt(e) -> np.ndarray:
    e = as_matrix(e)
    h = 0.5 * (e + e.conj().T)
    w, vecs = np.linalg.eigh(h)
    if w.size and w.min() < -1e-8:
        raise ValidationError(f"matrix is not PSD (eigenvalue {w.min():.3e})")
    return (vecs * np.sqrt(np.clip(w, 0, None))) @ vecs.conj().T


def psd_pinv_sqrt(e, tol: float = 1e-10) -> np.ndarray:
    """Pseudo-inverse square root restricted to the support of a PSD matrix."""
    e = as_matrix(e)
    w, vecs = np.linalg.eigh(0.5 * (e + e.conj().T))
    inv = np.where(w > tol, 1.0 / np.sqrt(np.where(w > tol, w, 1.0)), 0.0)
    return (vecs * inv) @ vecs.conj().T


def unitary_eig(u) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and an orthonormal eigenbasis of a unitary (via complex Schur)."""
    u = as_matrix(u)
    t, z = sla.schur(u, output="complex")
    return np.diag(t).copy(), z


# ---------------------------------------------------------------------------
# unitary completions
# ---------------------------------------------------------------------------

def unitary_from_matching_gram(x, y, tol: float = 1e-8) -> np.ndarray:
    """A unitary U with U x = y, given x^dag x = y^dag y."""
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != y.shape:
        raise ValidationError(f"shape mismatch {x.shape} vs {y.shape}")
    gap = float(np.linalg.norm(x.conj().T @ x - y.conj().T @ y))
    if gap > tol:
        raise ValidationError(f"Gram matrices differ by {gap:.3e}")
    dim = x.shape[0]
    w, s, vh = np.linalg.svd(y)
    v = x @ vh.conj().T  # columns are mutually orthogonal with norms s_i
    rows = [v[:, i].conj() / s[i] for i in range(s.size) if s[i] > 1e-12]
    keep = [i for i in range(s.size) if s[i] > 1e-12]
    top = np.array(rows).reshape(len(rows), dim)
    rest = nullspace_basis(top).conj().T if rows else np.eye(dim, dtype=complex)
    # rows for the kept singular vectors go first so they pair with w[:, keep]
    order = keep + [i for i in range(dim) if i not in keep]
    w = w[:, order]
    return w @ np.vstack([top, rest])


def embed_identity(rows: int, cols: int) -> np.ndarray:
    return np.eye(rows, cols, dtype=complex)


def unitary_extension_max_unit_eigs(v, tol: float = 1e-8) -> np.ndarray:
    """Extend an N x M isometry to a unitary with at least N - M unit eigenvalues."""
    v = check_isometry(v, tol)
    big, small = v.shape
    if big == small:
        return v.copy()
    f = nullspace_basis(v.conj().T - embed_identity(small, big))[:, : big - small]
    x2 = f[small:]  # only the lower block constrains W
    w0 = orthonormal_complement(v).conj().T
    q = unitary_from_matching_gram(w0 @ f, x2, tol=1e-6)
    w = q @ w0
    return np.hstack([v, w.conj().T])


def complete_to_unitary(v: np.ndarray) -> np.ndarray:
    """Append an orthonormal basis of the complement of range(v)."""
    if v.shape[0] == v.shape[1]:
        return v.copy()
    return np.hstack([v, orthonormal_complement(v)])
