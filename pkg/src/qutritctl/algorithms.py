"""Dimension-generic circuits built on the qudit Fourier gate: Ramsey
interferometry with Dirichlet-kernel fringes, Fisher-information precision
analysis, base-d Kitaev phase estimation, and dihedral parity checking."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import SolverError

_SMALL = 1e-6  # Taylor branch for removable singularities


def hadamard_d(d: int) -> np.ndarray:
    """The d-dimensional DFT gate, entries w^{jk}/sqrt(d)."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2j * np.pi * j * k / d) / np.sqrt(d)


def phase_gate_d(d: int, phi: float) -> np.ndarray:
    """Z_{d,phi} = diag(1, e^{i phi}, ..., e^{i(d-1) phi}): free evolution by phi."""
    return np.diag(np.exp(1j * phi * np.arange(d)))


def ramsey_state(d: int, phi: float) -> np.ndarray:
    """H_d^{-1} Z_{d,phi} H_d |0>."""
    H = hadamard_d(d)
    psi0 = np.zeros(d, dtype=complex)
    psi0[0] = 1.0
    return H.conj().T @ (phase_gate_d(d, phi) @ (H @ psi0))


def _dirichlet(d: int, x: float) -> float:
    """sin^2(d x/2)/sin^2(x/2) / d^2 with the removable singularity at x = 0 mod 2pi."""
    r = np.mod(x + np.pi, 2 * np.pi) - np.pi
    if abs(r) < _SMALL:
        # sin(d u)/ (d sin u) = 1 - (d^2-1) u^2 / 6 + O(u^4), u = r/2
        u = r / 2.0
        val = 1.0 - (d * d - 1) * u * u / 6.0
        return float(val * val)
    return float((np.sin(d * r / 2.0) / (d * np.sin(r / 2.0))) ** 2)


def ramsey_population(d: int, k: int, phi: float) -> float:
    """P_k(phi): the Dirichlet-kernel fringe peaked at phi = 2 pi k / d."""
    if not 0 <= k < d:
        raise ValueError("k must be in [0, d)")
    return _dirichlet(d, phi - 2 * np.pi * k / d)


def _dP0_dphi(d: int, phi: float) -> float:
    r = np.mod(phi + np.pi, 2 * np.pi) - np.pi
    if abs(r) < _SMALL:
        return float(-(d * d - 1) / 6.0 * r)
    s, sd = np.sin(r / 2.0), np.sin(d * r / 2.0)
    c, cd = np.cos(r / 2.0), np.cos(d * r / 2.0)
    return float((d * sd * cd * s - sd**2 * c) / (d * d * s**3))


def phase_precision(d: int, phi: float) -> float:
    """Single-shot precision sqrt(P0 (1-P0)) / |dP0/dphi| of the ground-state fringe.

    Returns inf at stationary points; the phi -> 0 limit is sqrt(3/(d^2-1)),
    saturating the Cramer-Rao bound.
    """
    r = np.mod(phi + np.pi, 2 * np.pi) - np.pi
    if abs(r) < _SMALL:
        return float(np.sqrt(3.0 / (d * d - 1)))
    P0 = ramsey_population(d, 0, phi)
    dP = _dP0_dphi(d, phi)
    if abs(dP) < 1e-12:
        return float("inf")
    return float(np.sqrt(max(P0 * (1 - P0), 0.0)) / abs(dP))


def qfi(d: int) -> float:
    """Quantum Fisher information of the qudit Ramsey probe: (d^2 - 1)/3."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    return (d * d - 1) / 3.0


def qfi_numeric(d: int, phi: float = 0.3, h: float = 2e-6) -> float:
    """QFI from the state derivative, F = 4(<dpsi|dpsi> - |<psi|dpsi>|^2)."""
    psi_p = ramsey_state(d, phi + h)
    psi_m = ramsey_state(d, phi - h)
    dpsi = (psi_p - psi_m) / (2 * h)
    psi = ramsey_state(d, phi)
    return float(4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2))


# ---------------------------------------------------------------------------
# Base-d Kitaev phase estimation
# ---------------------------------------------------------------------------

def ramsey_oracle(d: int, phi: float):
    """Exact measurement oracle: (scale, offset) -> outcome distribution of
    H_d^{-1} Z_{d, scale*phi + offset} H_d |0>."""
    def oracle(scale: int, offset: float) -> np.ndarray:
        psi = ramsey_state(d, scale * phi + offset)
        return np.abs(psi) ** 2
    return oracle


def kitaev_estimate(d: int, N: int, phase_oracle) -> list:
    """Recover the N base-d digits of phi/2pi, least significant first measured.

    Iterates delays d^{N-1} phi down to phi, canceling previously determined
    digits with an extra phase offset; each round's distribution peaks at the
    current digit (exactly, for exact N-digit expansions).
    """
    digits = [0] * N
    for j in range(N - 1, -1, -1):
        # amount already known from less-significant digits, as a phase at delay d^j
        known = sum(digits[l] * d ** (j - l - 1) for l in range(j + 1, N))
        offset = -2 * np.pi * known
        probs = phase_oracle(d**j, offset)
        digits[j] = int(np.argmax(probs))
    return digits


def digits_to_phase(d: int, digits) -> float:
    """phi = 2 pi * sum theta_k / d^{k+1}."""
    return float(2 * np.pi * sum(t / d ** (k + 1) for k, t in enumerate(digits)))


def kitaev_density(d: int, N: int, dphi: float) -> float:
    """Normalized outcome density after N rounds, (1/2 pi d^N) sin^2(d^N x/2)/sin^2(x/2).

    Integrates to 1 over one period; main peak FWHM scales as 1/d^N.
    """
    r = np.mod(dphi + np.pi, 2 * np.pi) - np.pi
    dN = d**N
    if abs(r) < 1e-8:
        u = r / 2.0
        val = dN * (1.0 - (dN * dN - 1) * u * u / 6.0)
        return float(val * val / (2 * np.pi * dN))
    return float(np.sin(dN * r / 2.0) ** 2 / np.sin(r / 2.0) ** 2 / (2 * np.pi * dN))


def kitaev_fwhm(d: int, N: int) -> float:
    """Full width at half maximum of the main density peak, by bisection."""
    peak = kitaev_density(d, N, 0.0)
    lo, hi = 0.0, np.pi / d**N
    while kitaev_density(d, N, hi) > peak / 2:
        hi *= 1.5
        if hi > np.pi:
            raise SolverError("half-maximum crossing not found")
    for _ in range(200):
        mid = (lo + hi) / 2
        if kitaev_density(d, N, mid) > peak / 2:
            lo = mid
        else:
            hi = mid
    return float(lo + hi)


# ---------------------------------------------------------------------------
# Dihedral parity check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DihedralElement:
    """pi(k) = +-k + r mod d: rotations are even, reflections odd."""
    d: int
    shift: int
    reflected: bool = False

    def __post_init__(self):
        if self.d < 3:
            raise ValueError("dihedral group needs d >= 3")
        object.__setattr__(self, "shift", int(self.shift) % self.d)

    def apply(self, k: int) -> int:
        return ((-k if self.reflected else k) + self.shift) % self.d

    def permutation(self) -> list:
        return [self.apply(k) for k in range(self.d)]

    def matrix(self) -> np.ndarray:
        U = np.zeros((self.d, self.d), dtype=complex)
        for k in range(self.d):
            U[self.apply(k), k] = 1.0
        return U

    def compose(self, other: "DihedralElement") -> "DihedralElement":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        # self after other
        if not self.reflected:
            return DihedralElement(self.d, self.shift + other.shift, other.reflected)
        return DihedralElement(self.d, self.shift - other.shift, not other.reflected)

    @classmethod
    def from_one_line(cls, perm) -> "DihedralElement":
        """Parse one-line notation [pi(0), pi(1), ...]; must be dihedral."""
        perm = [int(x) for x in perm]
        d = len(perm)
        for refl in (False, True):
            cand = cls(d, perm[0], refl)
            if cand.permutation() == perm:
                return cand
        raise ValueError("permutation is not an element of the dihedral group")


def parity_check(d: int, m: int, g: DihedralElement) -> int:
    """Run H_d^{-1} U_pi H_d |m> and return the measured basis index.

    For gcd(m, d) = 1 the outcome is m for rotations and d - m for
    reflections, with unit probability.
    """
    if g.d != d:
        raise ValueError("group element dimension mismatch")
    if gcd(m, d) != 1:
        raise ValueError("need gcd(m, d) = 1 for deterministic parity readout")
    H = hadamard_d(d)
    psi = np.zeros(d, dtype=complex)
    psi[m] = 1.0
    out = H.conj().T @ (g.matrix() @ (H @ psi))
    probs = np.abs(out) ** 2
    idx = int(np.argmax(probs))
    if abs(probs[idx] - 1.0) > 1e-10:
        raise SolverError("final state is not a basis state; parity readout failed")
    return idx
