"""Complex matrix core: Hermitian exponentials, gate fidelity, phase canonicalization.

All downstream modules inherit the tolerances fixed here.
"""
from __future__ import annotations

import numpy as np

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    U = np.asarray(U)
    d = U.shape[0]
    return np.linalg.norm(U.conj().T @ U - np.eye(d)) <= tol


def check_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] < 2:
        raise ValueError(f"expected a square matrix of dim >= 2, got shape {U.shape}")
    if not is_unitary(U, tol):
        raise ValueError("matrix is not unitary within tolerance")
    return U


def check_hermitian(H: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    if np.abs(H - H.conj().T).max() > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    return H


def expm_hermitian(H: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(-i H t) for Hermitian H, via eigendecomposition (exact, no step-size tuning)."""
    H = check_hermitian(H)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def average_gate_fidelity(U: np.ndarray, V: np.ndarray) -> float:
    """F = (|Tr(U^dag V)|^2 + d) / (d(d+1)); 1 iff U = e^{i phi} V.

    Symmetric in its arguments and invariant under global phases.
    """
    U = np.asarray(U)
    V = np.asarray(V)
    if U.shape != V.shape:
        raise ValueError(f"dimension mismatch: {U.shape} vs {V.shape}")
    d = U.shape[0]
    return float((abs(np.trace(U.conj().T @ V)) ** 2 + d) / (d * (d + 1)))


def canonicalize_phase(U: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Strip the global phase: make the first nonzero entry (row-major) real positive.

    Idempotent, and canonicalize(e^{i a} U) == canonicalize(U) for any a.
    """
    U = np.asarray(U, dtype=complex)
    flat = U.ravel()
    nz = np.flatnonzero(np.abs(flat) > tol)
    if nz.size == 0:
        return U.copy()
    pivot = flat[nz[0]]
    return U * (abs(pivot) / pivot)


def canonical_key(U: np.ndarray, decimals: int = 8) -> tuple:
    """Hashable fingerprint of a unitary modulo global phase."""
    Uc = canonicalize_phase(U)
    arr = np.round(Uc.ravel().view(float), decimals)
    return tuple(arr + 0.0)  # +0.0 collapses -0.0


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary from a QR decomposition with phase-fixed R."""
    ginibre = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(ginibre)
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))
