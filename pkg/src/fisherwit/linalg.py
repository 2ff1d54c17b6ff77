"""Dense complex linear algebra on small Hermitian matrices."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionLimit, DimensionMismatch, NonHermitian, NonSquare

MAX_DIM = 64
HERMITIAN_TOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise NonSquare(f"expected a 2-d matrix, got shape {m.shape}")
    if max(m.shape) > MAX_DIM:
        raise DimensionLimit(f"matrix dimension {m.shape} exceeds {MAX_DIM}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return `h` as a complex array after checking squareness and Hermiticity.

    The tolerance is relative: ``||H - H^dag||_F <= tol * max(1, ||H||_F)``.
    The returned matrix is exactly Hermitian (the anti-Hermitian residue is dropped).
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise NonSquare(f"matrix of shape {h.shape} is not square")
    scale = max(1.0, np.linalg.norm(h))
    if np.linalg.norm(h - h.conj().T) > tol * scale:
        raise NonHermitian("matrix is not Hermitian within tolerance")
    return hermitian_part(h)


def hermitian_eig(h) -> HermitianEig:
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of a Hermitian matrix."""
    h = check_hermitian(h)
    w, v = np.linalg.eigh(h)
    return HermitianEig(w, v)


def kron(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > MAX_DIM:
        raise DimensionLimit(f"kron result {rows}x{cols} exceeds {MAX_DIM}")
    return np.kron(a, b)


def partial_trace(x, dims: tuple[int, int], keep: str = "A") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``keep="A"`` returns Tr_B X, ``keep="B"`` returns Tr_A X.
    """
    x = as_matrix(x)
    da, db = int(dims[0]), int(dims[1])
    if x.shape != (da * db, da * db):
        raise DimensionMismatch(f"operator of shape {x.shape} does not match dims {dims}")
    t = x.reshape(da, db, da, db)
    if keep in ("A", 0):
        return np.einsum("ibjb->ij", t)
    if keep in ("B", 1):
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def unitary_from_generator(g, theta: float) -> np.ndarray:
    """exp(-i theta G) via the eigendecomposition of G."""
    w, v = hermitian_eig(g)
    return (v * np.exp(-1j * theta * w)) @ v.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def ket(*amplitudes) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    return psi / np.linalg.norm(psi)


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def basis_projector(dim: int, i: int) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=complex)
    p[i, i] = 1
    return p


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """Bloch coordinates (x, y, z) of a 2x2 Hermitian operator with unit trace."""
    rho = np.asarray(rho, dtype=complex)
    return np.real([np.trace(rho @ PAULI_X), np.trace(rho @ PAULI_Y), np.trace(rho @ PAULI_Z)])


def from_bloch(vec) -> np.ndarray:
    x, y, z = np.asarray(vec, dtype=float)
    return (PAULI_I + x * PAULI_X + y * PAULI_Y + z * PAULI_Z) / 2


def pauli_components(a: np.ndarray) -> tuple[float, np.ndarray]:
    """Write a 2x2 Hermitian A as a*I + b.sigma and return (a, b)."""
    a = np.asarray(a, dtype=complex)
    a0 = np.real(np.trace(a)) / 2
    b = np.real([np.trace(a @ PAULI_X), np.trace(a @ PAULI_Y), np.trace(a @ PAULI_Z)]) / 2
    return float(a0), b


def expectation(op: np.ndarray, rho: np.ndarray) -> float:
    return float(np.real(np.einsum("ij,ji->", op, rho)))
