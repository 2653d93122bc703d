"""Canonical qutrit gate matrices: the DFT Hadamard, the X-type permutation family,
and the diagonal phase gates realized virtually."""
from __future__ import annotations

import numpy as np

OMEGA = np.exp(2j * np.pi / 3)

H = np.array([[1, 1, 1], [1, OMEGA, OMEGA**2], [1, OMEGA**2, OMEGA]], dtype=complex) / np.sqrt(3)
X = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)        # 0 -> 1 -> 2 -> 0
X_INV = X.conj().T                                                     # 0 -> 2 -> 1 -> 0
X01 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
X12 = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
X02 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
Z = np.diag([1, OMEGA, OMEGA**2]).astype(complex)
S = np.diag([1, 1, OMEGA]).astype(complex)
T = np.diag([1, np.exp(2j * np.pi / 9), np.exp(-2j * np.pi / 9)]).astype(complex)

H_INV = H.conj().T

# Even permutations: I, X, X_inv; odd: X01, X12, X02.
X_TYPE = {"I": np.eye(3, dtype=complex), "X": X, "X_inv": X_INV,
          "X01": X01, "X12": X12, "X02": X02}
X_TYPE_PARITY = {"I": 0, "X": 0, "X_inv": 0, "X01": 1, "X12": 1, "X02": 1}


def virtual_phase(phi1: float, phi2: float) -> np.ndarray:
    """Z_phi = diag(1, e^{i phi1}, e^{i(phi1+phi2)}), the zero-duration phase gate."""
    return np.diag([1.0, np.exp(1j * phi1), np.exp(1j * (phi1 + phi2))]).astype(complex)


def projector(*levels: int, dim: int = 3) -> np.ndarray:
    P = np.zeros((dim, dim), dtype=complex)
    for n in levels:
        P[n, n] = 1.0
    return P
