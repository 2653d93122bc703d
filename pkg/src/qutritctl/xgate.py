"""Invariant-based synthesis of the X-type gates.

A dynamical invariant of the resonant two-tone ladder Hamiltonian is
parameterized by two auxiliary angles gamma(t), beta(t).  Polynomial ansaetze
meeting the boundary conditions leave a single amplitude lambda free, which
tunes the accumulated phase theta; theta = -3pi/2 realizes the cyclic X gate
(after time reversal) and theta = -pi the 0<->2 swap.  Inverting the auxiliary
ODEs yields the drive envelopes, smooth and zero at both ends.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import gates
from .errors import SolverError
from .pulses import PulseSchedule, sine_squared_pi_pulse, time_grid

BETA_RATE = 1386.0          # d(beta)/ds = BETA_RATE * pi * [s(1-s)]^5
_BETA_COEFFS = (231.0, -990.0, 3465.0 / 2.0, -1540.0, 693.0, -126.0)  # s^6 .. s^11
_SERIES_CROSSOVER = 1e-6    # gamma below this: evaluate cot(gamma) by series
LAMBDA_BRACKET = (20.0, 60.0)

X_KIND_THETA = {"X": -1.5 * np.pi, "X_inverse": -1.5 * np.pi, "X02": -np.pi}


def gamma_beta(t: float | np.ndarray, lam: float, duration: float):
    """Auxiliary angles at time t: gamma = lam s^3(1-s)^3, beta the degree-11 polynomial."""
    s = np.asarray(t, dtype=float) / duration
    if np.any(s < -1e-12) or np.any(s > 1 + 1e-12):
        raise ValueError("t outside [0, duration]")
    gamma = lam * s**3 * (1 - s) ** 3
    beta = np.pi * sum(c * s ** (6 + k) for k, c in enumerate(_BETA_COEFFS))
    return gamma, beta


def beta_dot(t: float | np.ndarray, duration: float):
    s = np.asarray(t, dtype=float) / duration
    return (BETA_RATE * np.pi / duration) * (s * (1 - s)) ** 5


def gamma_dot(t: float | np.ndarray, lam: float, duration: float):
    s = np.asarray(t, dtype=float) / duration
    return (3.0 * lam / duration) * s**2 * (1 - s) ** 2 * (1 - 2 * s)


def _beta_dot_cot_gamma(s: np.ndarray, lam: float, duration: float) -> np.ndarray:
    """beta_dot * cot(gamma) with a series branch where gamma underflows.

    Near the endpoints beta_dot ~ s^5 while gamma ~ lam s^3, so the product
    behaves as s^2 and both envelopes vanish smoothly.
    """
    s = np.asarray(s, dtype=float)
    g = lam * s**3 * (1 - s) ** 3
    small = g < _SERIES_CROSSOVER
    out = np.empty_like(s)
    gs = np.where(small, 1.0, g)
    out = (BETA_RATE * np.pi / duration) * (s * (1 - s)) ** 5 / np.tan(gs)
    series = (BETA_RATE * np.pi / (lam * duration)) * (s * (1 - s)) ** 2 * (1 - g * g / 3.0)
    return np.where(small, series, out)


def lr_phase(lam: float, duration: float = 1.0) -> float:
    """Accumulated phase theta(lambda) = -int beta_dot / sin(gamma) dt.

    Dimensionless in s = t/T, hence independent of the duration.  The
    integrand is finite at both endpoints (~ s^2 / lambda).
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")

    def integrand(s):
        g = lam * s**3 * (1 - s) ** 3
        if g < _SERIES_CROSSOVER:
            return BETA_RATE * np.pi * (s * (1 - s)) ** 2 / lam * (1 + g * g / 6.0)
        return BETA_RATE * np.pi * (s * (1 - s)) ** 5 / np.sin(g)

    val, err = quad(integrand, 0.0, 1.0, limit=200, epsabs=1e-10, epsrel=1e-10)
    if err > 1e-6:
        raise SolverError(f"phase quadrature did not converge (err={err:.2e})")
    return -float(val)


def solve_lambda(theta_target: float) -> float:
    """Invert theta(lambda) on the monotone bracket [20, 60]."""
    lo, hi = LAMBDA_BRACKET
    flo = lr_phase(lo) - theta_target
    fhi = lr_phase(hi) - theta_target
    if flo * fhi > 0:
        raise SolverError(f"target phase {theta_target} not attained on bracket {LAMBDA_BRACKET}")
    return float(brentq(lambda l: lr_phase(l) - theta_target, lo, hi, xtol=1e-12))


@dataclass(frozen=True)
class LRDesign:
    lam: float
    duration: float
    theta_target: float
    kind: str  # X | X_inverse | X02

    def __post_init__(self):
        if self.kind not in X_KIND_THETA:
            raise ValueError(f"kind must be one of {sorted(X_KIND_THETA)}")
        g0, b0 = gamma_beta(0.0, self.lam, self.duration)
        gT, bT = gamma_beta(self.duration, self.lam, self.duration)
        if max(abs(g0), abs(gT), abs(b0), abs(bT - np.pi / 2)) > 1e-12:
            raise ValueError("ansatz boundary conditions violated")
        if abs(lr_phase(self.lam) - self.theta_target) > 1e-3:
            raise ValueError("lambda does not realize the target phase")


@lru_cache(maxsize=8)
def design_for(kind: str, duration: float = 35.0) -> LRDesign:
    theta = X_KIND_THETA[kind]
    return LRDesign(lam=solve_lambda(theta), duration=duration, theta_target=theta, kind=kind)


def rabi_from_invariant(design: LRDesign, dt: float) -> PulseSchedule:
    """Invert the auxiliary ODEs into the two drive envelopes (Delta = 0).

    Omega1 = 2(gamma_dot cos(beta) + beta_dot cot(gamma) sin(beta)),
    Omega2 = 2(-gamma_dot sin(beta) + beta_dot cot(gamma) cos(beta)).
    For kind == "X" the envelopes are the time reverse of the X_inverse pair,
    which by the ansatz mirror symmetry is the same as swapping them.
    """
    if dt > design.duration / 200.0:
        raise ValueError("dt too coarse to resolve the envelope (need dt <= T/200)")
    t = time_grid(design.duration, dt)
    s = t / design.duration
    gd = gamma_dot(t, design.lam, design.duration)
    _, beta = gamma_beta(t, design.lam, design.duration)
    r = _beta_dot_cot_gamma(s, design.lam, design.duration)
    omega1 = 2.0 * (gd * np.cos(beta) + r * np.sin(beta))
    omega2 = 2.0 * (-gd * np.sin(beta) + r * np.cos(beta))
    if design.kind == "X":
        omega1, omega2 = omega2, omega1
    return PulseSchedule(dt=dt, omega1=omega1, omega2=omega2,
                         detuning=np.zeros_like(omega1), duration=design.duration)


def evolution_from_theta(theta: float) -> np.ndarray:
    """The exact propagator as a function of the accumulated phase."""
    return np.array([[0.0, 1j * np.sin(theta), np.cos(theta)],
                     [0.0, np.cos(theta), 1j * np.sin(theta)],
                     [-1.0, 0.0, 0.0]], dtype=complex)


def _solve_diagonal_correction(U: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Diagonal D with D @ U = target up to global phase, for monomial targets."""
    d = np.zeros(3, dtype=complex)
    for i in range(3):
        j = int(np.argmax(np.abs(target[i])))
        if abs(U[i, j]) < 1e-6:
            raise SolverError("simulated matrix does not share the target's support")
        d[i] = target[i, j] / U[i, j]
    d /= np.abs(d)
    return np.diag(d)


def residual_phase_correction(kind: str, U: np.ndarray | None = None) -> np.ndarray:
    """Diagonal phase gate mapping the bare evolution onto the Eq-target permutation.

    Solved entrywise against the actual (or ideal) evolution; intended to be
    absorbed as a virtual phase by the compiler.
    """
    if kind not in X_KIND_THETA:
        raise ValueError(f"kind must be one of {sorted(X_KIND_THETA)}")
    target = {"X": gates.X, "X_inverse": gates.X_INV, "X02": gates.X02}[kind]
    if U is None:
        U = evolution_from_theta(X_KIND_THETA[kind])
        if kind == "X":
            U = U.T  # time-reversed schedule of a real Hamiltonian transposes the propagator
    return _solve_diagonal_correction(np.asarray(U, dtype=complex), target)


def subspace_pi_schedule(kind: str, duration: float = 35.0, dt: float = 0.05) -> PulseSchedule:
    """Resonant sin^2 pi pulse on a single transition, for X01 / X12."""
    if kind not in ("X01", "X12"):
        raise ValueError("subspace pulses exist for X01 and X12 only")
    env = sine_squared_pi_pulse(duration, dt)
    zero = np.zeros_like(env)
    if kind == "X01":
        return PulseSchedule(dt, env, zero, zero.copy(), duration)
    return PulseSchedule(dt, zero, env, zero.copy(), duration)


def subspace_phase_correction(kind: str) -> np.ndarray:
    """A resonant pi rotation gives -i on the driven subspace; undo it diagonally."""
    if kind == "X01":
        return np.diag([1j, 1j, 1.0]).astype(complex)
    if kind == "X12":
        return np.diag([1.0, 1j, 1j]).astype(complex)
    raise ValueError("kind must be X01 or X12")
