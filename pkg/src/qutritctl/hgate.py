"""Analytic synthesis of the qutrit Hadamard gate.

The constant-drive propagator of the two-photon-resonant ladder Hamiltonian
has a closed form in the reduced parameters (theta, Omega0, Omega, A, delta).
Requiring all nine matrix elements to have modulus 1/sqrt(3) pins
Omega1 = Omega2 and reduces the problem to two conditions on (A, delta);
the smallest-|A| root is bracketed and solved here.  A diagonal phase
sandwich then turns the propagator into the Hadamard (or its inverse for
negative detuning), and the same areas realized by chirped pulses with a
common envelope give the identical gate.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import SolverError
from .pulses import PulseSchedule, flat_top_envelope, time_grid


def propagator_constant(omega1_T: float, omega2_T: float, delta_T: float) -> np.ndarray:
    """Closed-form propagator of the constant ladder drive, dimensionless inputs.

    Evaluates the analytic matrix elements directly (not by numerical
    exponentiation); the bright/dark-state structure makes the off-diagonal
    blocks symmetric: U01 = U10, U12 = U21, U02 = U20.
    """
    if omega1_T == 0.0 and omega2_T == 0.0 and delta_T == 0.0:
        return np.eye(3, dtype=complex)
    theta = np.arctan2(omega1_T, omega2_T)
    omega0 = np.hypot(omega1_T, omega2_T)
    omega = np.hypot(omega0, delta_T)
    A = omega
    delta = delta_T / 2.0
    st, ct = np.sin(theta), np.cos(theta)
    phase = np.exp(-1j * delta)
    cA, sA = np.cos(A / 2.0), np.sin(A / 2.0)
    z = phase * (cA + 1j * (delta_T / omega) * sA)
    U = np.empty((3, 3), dtype=complex)
    U[0, 0] = ct**2 + z * st**2
    U[1, 1] = phase * (cA - 1j * (delta_T / omega) * sA)
    U[2, 2] = st**2 + z * ct**2
    U[0, 1] = U[1, 0] = -1j * phase * (omega0 / omega) * st * sA
    U[1, 2] = U[2, 1] = -1j * phase * (omega0 / omega) * ct * sA
    U[0, 2] = U[2, 0] = (z - 1.0) * st * ct
    return U


@dataclass(frozen=True)
class HGateSolution:
    """Smallest-area solution of the equal-modulus conditions.

    A and delta are the dimensionless pulse area and half phase; sign selects
    the Hadamard (+1, positive detuning) or its inverse (-1).
    """
    A: float
    delta: float
    theta: float
    omega1_T: float
    omega2_T: float
    delta_T: float
    sign: int = +1

    def with_sign(self, sign: int) -> "HGateSolution":
        if sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")
        return HGateSolution(self.A, sign * abs(self.delta), self.theta,
                             self.omega1_T, self.omega2_T, sign * abs(self.delta_T), sign)

    def condition_residuals(self) -> tuple[float, float]:
        A, d = self.A, abs(self.delta)
        ra = d**2 - (A / 2) ** 2 * (1 - 2 / (3 * np.sin(A / 2) ** 2))
        rb = np.cos(A / 2) * np.cos(d) + (2 * d / A) * np.sin(A / 2) * np.sin(d)
        return float(ra), float(rb)


def _half_phase_of_area(A: float) -> float:
    s2 = np.sin(A / 2.0) ** 2
    return (A / 2.0) * np.sqrt(1.0 - 2.0 / (3.0 * s2))


def _phase_condition(A: float) -> float:
    d = _half_phase_of_area(A)
    return np.cos(A / 2.0) * np.cos(d) + (2.0 * d / A) * np.sin(A / 2.0) * np.sin(d)


@lru_cache(maxsize=1)
def solve_h_conditions() -> HGateSolution:
    """Solve the two equal-modulus conditions for the smallest-|A| branch.

    The first condition keeps the half phase real only while sin^2(A/2) >= 2/3;
    on [pi, A_max) the second condition changes sign exactly once, which
    brackets the smallest root deterministically.
    """
    a_max = 2.0 * (np.pi - np.arcsin(np.sqrt(2.0 / 3.0)))
    lo, hi = np.pi, a_max - 1e-12
    if _phase_condition(lo) * _phase_condition(hi) > 0:
        raise SolverError("equal-modulus condition does not change sign on the bracket")
    A = brentq(_phase_condition, lo, hi, xtol=1e-14)
    delta = _half_phase_of_area(A)
    omega0_T = np.sqrt(A**2 - (2 * delta) ** 2)
    omega1_T = omega0_T / np.sqrt(2.0)
    return HGateSolution(A=float(A), delta=float(delta), theta=float(np.pi / 4),
                         omega1_T=float(omega1_T), omega2_T=float(omega1_T),
                         delta_T=float(2 * delta), sign=+1)


def sandwich_phases(sol: HGateSolution) -> tuple[np.ndarray, np.ndarray]:
    """The diagonal phase pair (D1, D2) completing D1 @ U @ D2 into H or H^-1."""
    d = sol.sign * abs(sol.delta)
    if sol.sign >= 0:
        D1 = np.diag([1.0, np.exp(1j * (2 * np.pi / 3 + d)), np.exp(-2j * np.pi / 3)])
        D2 = np.diag([np.exp(-1j * np.pi / 6), np.exp(1j * (np.pi / 2 + d)), np.exp(-5j * np.pi / 6)])
    else:
        D1 = np.diag([1.0, np.exp(1j * (np.pi / 3 + d)), np.exp(2j * np.pi / 3)])
        D2 = np.diag([np.exp(1j * np.pi / 6), np.exp(1j * (np.pi / 2 + d)), np.exp(5j * np.pi / 6)])
    return D1.astype(complex), D2.astype(complex)


def h_phase_sandwich(U: np.ndarray, sol: HGateSolution) -> np.ndarray:
    """D1 @ U @ D2 with the exact diagonal phases for the solution's sign."""
    D1, D2 = sandwich_phases(sol)
    return D1 @ np.asarray(U, dtype=complex) @ D2


def chirp_ratio() -> float:
    """Delta(t)/Omega(t) for the common-envelope chirp (~0.6581)."""
    sol = solve_h_conditions()
    return abs(sol.delta_T) / sol.omega1_T


def chirped_h_schedule(duration: float = 35.0, dt: float = 0.05, edge: float = 5.0,
                       sign: int = +1, edge_sigma_ratio: float = 2.5) -> PulseSchedule:
    """Chirped-pulse schedule realizing the Hadamard areas with a shared envelope.

    Omega1(t) = Omega2(t) share a flat-top envelope with Gaussian edges and
    Delta(t) is proportional to it, so the Hamiltonian family commutes and the
    propagator depends only on the integrated areas.
    """
    if duration <= 2 * edge:
        raise ValueError(f"duration must exceed twice the edge length ({2 * edge} ns)")
    sol = solve_h_conditions()
    t = time_grid(duration, dt)
    env = flat_top_envelope(t, duration, edge, edge_sigma_ratio)
    omega = env * (sol.omega1_T / np.trapezoid(env, t))
    detuning = omega * (sign * abs(sol.delta_T) / sol.omega1_T)
    return PulseSchedule(dt=dt, omega1=omega, omega2=omega.copy(),
                         detuning=detuning, duration=duration)
