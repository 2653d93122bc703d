"""Coherence modeling and readout: cascaded relaxation rate equations,
stretched-exponential Ramsey dephasing, and voltage-to-population inversion.

Times are in microseconds throughout this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import expm
from scipy.optimize import curve_fit, least_squares

from .errors import FitError

# Table-S1-like defaults for a transmon qutrit
TABLE_DEFAULTS = dict(f01=4.993, f12=4.800, f02=4.896,
                      T1_01=60.7, T1_12=28.4, T1_02=523.1,
                      T2_01=4.6, T2_12=4.4, T2_02=4.2)


@dataclass(frozen=True)
class DeviceParams:
    f01: float = TABLE_DEFAULTS["f01"]
    f12: float = TABLE_DEFAULTS["f12"]
    f02: float = TABLE_DEFAULTS["f02"]
    T1_01: float = TABLE_DEFAULTS["T1_01"]
    T1_12: float = TABLE_DEFAULTS["T1_12"]
    T1_02: float = TABLE_DEFAULTS["T1_02"]
    T2_01: float = TABLE_DEFAULTS["T2_01"]
    T2_12: float = TABLE_DEFAULTS["T2_12"]
    T2_02: float = TABLE_DEFAULTS["T2_02"]
    n_01: float = 1.0
    n_12: float = 1.0
    n_02: float = 1.0

    def __post_init__(self):
        for name in ("T1_01", "T1_12", "T1_02", "T2_01", "T2_12", "T2_02"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def rate_generator(params: DeviceParams) -> np.ndarray:
    """Columns sum to zero by construction, so probability is conserved exactly.

    Cascade |2> -> |1> -> |0> plus the direct channel |2> -> |0>.
    """
    g12 = 1.0 / params.T1_12
    g01 = 1.0 / params.T1_01
    g02 = 1.0 / params.T1_02
    return np.array([
        [0.0, g01, g02],
        [0.0, -g01, g12],
        [0.0, 0.0, -(g12 + g02)],
    ])


def rate_equation_evolve(p0, params: DeviceParams, t: float) -> np.ndarray:
    """Closed-form relaxation of a population vector via the matrix exponential."""
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (3,) or np.any(p0 < -1e-9) or abs(p0.sum() - 1.0) > 1e-9:
        raise ValueError("initial populations must lie on the probability simplex")
    return expm(rate_generator(params) * t) @ p0


def _relaxation_traces(times, T1_01, T1_12, T1_02):
    """Stacked populations for initializations |1> and |2> at the given times."""
    params = DeviceParams(T1_01=T1_01, T1_12=T1_12, T1_02=T1_02)
    M = rate_generator(params)
    out = []
    for init in (1, 2):
        p0 = np.eye(3)[init]
        out.append(np.stack([expm(M * t) @ p0 for t in times]))
    return np.concatenate(out, axis=0)  # (2*len(times), 3)


def fit_t1(times, trace_init1, trace_init2):
    """Joint fit of all three relaxation times to both initialization traces.

    trace_init1/2 are (n, 3) population arrays for starts in |1> and |2>.
    """
    times = np.asarray(times, dtype=float)
    y1 = np.asarray(trace_init1, dtype=float)
    y2 = np.asarray(trace_init2, dtype=float)
    if times.size < 10:
        raise ValueError("need at least 10 time points per trace")
    data = np.concatenate([y1, y2], axis=0).ravel()
    if np.ptp(data) < 1e-9:
        raise FitError("relaxation traces are constant")

    def resid(logT):
        model = _relaxation_traces(times, *np.exp(logT)).ravel()
        return model - data

    x0 = np.log([50.0, 50.0, 200.0])
    sol = least_squares(resid, x0, method="lm", max_nfev=20000)
    if not sol.success:
        raise FitError("relaxation fit did not converge")
    T1_01, T1_12, T1_02 = np.exp(sol.x)
    return float(T1_01), float(T1_12), float(T1_02)


def ramsey_model(t, detuning, T2, n, amp, phi0, params: DeviceParams,
                 transition: str = "01"):
    """Damped fringe on a relaxation background.

    P(t) = amp cos(detuning t + phi0) exp[-(t/T2)^n] + baseline(t), where the
    baseline is the rate-equation ground-population for an equal mixture of
    the transition's two levels.
    """
    t = np.asarray(t, dtype=float)
    lo, hi = int(transition[0]), int(transition[1])
    M = rate_generator(params)
    p0 = np.zeros(3)
    p0[lo] = p0[hi] = 0.5
    baseline = np.stack([expm(M * ti) @ p0 for ti in t])[:, 0]
    return amp * np.cos(detuning * t + phi0) * np.exp(-((t / T2) ** n)) + baseline


def _count_oscillations(y) -> int:
    y = np.asarray(y, dtype=float)
    yc = y - y.mean()
    signs = np.sign(yc[np.abs(yc) > 1e-3 * max(np.ptp(y), 1e-12)])
    return int(np.sum(signs[1:] != signs[:-1]))


def fit_t2(times, trace, params: DeviceParams, transition: str = "01",
           detuning_guess: float | None = None):
    """Extract (T2, n) from a Ramsey fringe; fails fast on non-oscillatory data."""
    times = np.asarray(times, dtype=float)
    trace = np.asarray(trace, dtype=float)
    if _count_oscillations(trace) < 6:  # ~3 periods
        raise FitError("trace shows no usable oscillation (need >= 3 periods)")
    if detuning_guess is None:
        # dominant nonzero frequency of the detrended trace
        yc = trace - trace.mean()
        freqs = np.fft.rfftfreq(times.size, d=times[1] - times[0])
        spect = np.abs(np.fft.rfft(yc))
        detuning_guess = 2 * np.pi * freqs[1 + int(np.argmax(spect[1:]))]

    def model(t, det, T2, n, amp, phi0):
        return ramsey_model(t, det, T2, n, amp, phi0, params, transition)

    p0 = [detuning_guess, max(times.mean(), 1.0), 1.0, 0.5 * np.ptp(trace), 0.0]
    try:
        popt, _ = curve_fit(model, times, trace, p0=p0,
                            bounds=([0.0, 1e-3, 0.3, 0.0, -np.pi],
                                    [np.inf, 1e4, 3.0, 1.0, np.pi]), maxfev=20000)
    except Exception as exc:  # noqa: BLE001
        raise FitError(f"ramsey fit failed: {exc}") from exc
    return float(popt[1]), float(popt[2])


@dataclass(frozen=True)
class ReadoutCalib:
    """reference[n, j]: response voltage with the qutrit prepared in |n> at frequency j."""
    reference: np.ndarray

    def __post_init__(self):
        ref = np.asarray(self.reference, dtype=float)
        if ref.shape != (3, 3):
            raise ValueError("reference matrix must be 3x3")
        object.__setattr__(self, "reference", ref)
        if abs(np.linalg.det(ref)) < 1e-300:
            raise ValueError("calibration matrix is singular")

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.reference))


@dataclass(frozen=True)
class ReadoutResult:
    populations: np.ndarray
    condition: float
    ill_conditioned: bool
    projected: bool


def _simplex_lsq(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """min ||A p - b|| s.t. sum p = 1, p >= 0, by active-set enumeration (3 vars)."""
    best = None
    best_cost = np.inf
    idx = (0, 1, 2)
    for r in (3, 2, 1):
        for support in combinations(idx, r):
            # solve equality-constrained lsq on the support
            As = A[:, support]
            # parameterize: p_support free with sum = 1 -> substitute last = 1 - rest
            if r == 1:
                p = np.zeros(3)
                p[support[0]] = 1.0
            else:
                k = r - 1
                Ared = As[:, :k] - As[:, [k]]
                brhs = b - As[:, k]
                sol, *_ = np.linalg.lstsq(Ared, brhs, rcond=None)
                p = np.zeros(3)
                p[list(support[:k])] = sol
                p[support[k]] = 1.0 - sol.sum()
            if np.any(p < -1e-12):
                continue
            cost = float(np.linalg.norm(A @ p - b))
            if cost < best_cost - 1e-15:
                best_cost = cost
                best = np.clip(p, 0.0, 1.0)
    return best / best.sum()


def populations_from_voltages(V, calib: ReadoutCalib,
                              cond_warn: float = 1e6) -> ReadoutResult:
    """Solve V_j = sum_n P_n * ref[n, j]; project onto the simplex if needed."""
    V = np.asarray(V, dtype=float)
    if V.shape != (3,):
        raise ValueError("need three voltage samples")
    A = calib.reference.T  # rows: frequency points, cols: states
    p = np.linalg.solve(A, V)
    projected = False
    if np.any(p < -1e-6) or np.any(p > 1 + 1e-6) or abs(p.sum() - 1.0) > 1e-6:
        p = _simplex_lsq(A, V)
        projected = True
    cond = calib.condition
    return ReadoutResult(populations=p, condition=cond,
                         ill_conditioned=bool(cond > cond_warn), projected=projected)
