"""Time-dependent propagation of pulse schedules.

Two frames are supported: the ideal three-level two-photon rotating frame
(drive detuning on |1> only), and a multilevel transmon ladder in a
carrier-resonant frame where each tone couples every neighboring transition,
which is the minimal model for cross-coupling coherent errors.

The default integrator steps through the schedule segments with a
fourth-order commutator-free pair of Hermitian exponentials (Gauss-Legendre
nodes), so every propagator is unconditionally unitary.  Classic RK4 is
available for cross-checks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import gates, xgate
from .hgate import chirped_h_schedule, sandwich_phases, solve_h_conditions
from .pulses import PulseSchedule
from .qmath import average_gate_fidelity

_GAUSS_OFFSET = np.sqrt(3.0) / 6.0
_CF4_A1 = 0.25 + _GAUSS_OFFSET
_CF4_A2 = 0.25 - _GAUSS_OFFSET


@dataclass(frozen=True)
class ErrorKnobs:
    """Fractional amplitude errors eta and detuning errors zeta (delta = 2*pi*zeta/T)."""
    eta1: float = 0.0
    eta2: float = 0.0
    zeta1: float = 0.0
    zeta2: float = 0.0

    def __post_init__(self):
        for name in ("eta1", "eta2", "zeta1", "zeta2"):
            if abs(getattr(self, name)) > 0.5:
                raise ValueError(f"|{name}| must be <= 0.5")

    def is_zero(self) -> bool:
        return self.eta1 == self.eta2 == self.zeta1 == self.zeta2 == 0.0


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.02
    method: str = "piecewise_expm"
    frame: str = "two_photon_rotating"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.method not in ("piecewise_expm", "rk4"):
            raise ValueError("method must be piecewise_expm or rk4")
        if self.frame not in ("two_photon_rotating", "multilevel_transmon"):
            raise ValueError("unknown frame")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QUTRITCTL_THREADS", "1")))
    except ValueError:
        return 1


def _substeps(schedule: PulseSchedule, cfg: SimConfig) -> int:
    if cfg.dt > schedule.dt * (1 + 1e-9):
        raise ValueError("integration dt must not exceed the schedule sampling dt")
    return max(1, int(np.ceil(schedule.dt / cfg.dt - 1e-9)))


def _ham3(o1, o2, det, t, knobs: ErrorKnobs, duration: float) -> np.ndarray:
    """Rotating-frame qutrit Hamiltonian at one instant; o1/o2 are raising coefficients."""
    d1 = 2 * np.pi * knobs.zeta1 / duration
    d2 = 2 * np.pi * knobs.zeta2 / duration
    r1 = 0.5 * o1 * (1 + knobs.eta1) * np.exp(-1j * d1 * t)
    r2 = 0.5 * o2 * (1 + knobs.eta2) * np.exp(1j * d2 * t)
    return np.array([[0.0, np.conj(r1), 0.0],
                     [r1, det, np.conj(r2)],
                     [0.0, r2, 0.0]], dtype=complex)


def _expm_step(H: np.ndarray, h: float) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * h)) @ V.conj().T


def _propagate(ham_at, duration: float, n_segments: int, substeps: int,
               method: str, dim: int, record=None):
    """Time-ordered product over a uniform grid; ham_at(t) -> Hermitian matrix."""
    U = np.eye(dim, dtype=complex)
    seg = duration / n_segments
    h = seg / substeps
    for k in range(n_segments):
        for j in range(substeps):
            t0 = k * seg + j * h
            if method == "piecewise_expm":
                H1 = ham_at(t0 + (0.5 - _GAUSS_OFFSET) * h)
                H2 = ham_at(t0 + (0.5 + _GAUSS_OFFSET) * h)
                U = _expm_step(_CF4_A2 * H1 + _CF4_A1 * H2, h) @ \
                    _expm_step(_CF4_A1 * H1 + _CF4_A2 * H2, h) @ U
            else:  # rk4 on dU/dt = -i H(t) U
                k1 = -1j * ham_at(t0) @ U
                k2 = -1j * ham_at(t0 + h / 2) @ (U + h / 2 * k1)
                k3 = -1j * ham_at(t0 + h / 2) @ (U + h / 2 * k2)
                k4 = -1j * ham_at(t0 + h) @ (U + h * k3)
                U = U + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if record is not None:
            record(k + 1, U)
    return U


def _interpolators(schedule: PulseSchedule):
    t = schedule.times
    o1 = np.asarray(schedule.omega1, dtype=complex)
    o2 = np.asarray(schedule.omega2, dtype=complex)
    de = np.asarray(schedule.detuning, dtype=float)

    def at(tm):
        a = np.interp(tm, t, o1.real) + 1j * np.interp(tm, t, o1.imag)
        b = np.interp(tm, t, o2.real) + 1j * np.interp(tm, t, o2.imag)
        d = np.interp(tm, t, de)
        return a, b, d

    return at


def evolve(schedule: PulseSchedule, knobs: ErrorKnobs | None = None,
           cfg: SimConfig | None = None) -> np.ndarray:
    """Time-ordered propagator of the qutrit rotating-frame Hamiltonian.

    H(t) = Delta(t)|1><1| + (1/2)(Omega1(1+eta1)e^{i d1 t}|0><1|
           + Omega2(1+eta2)e^{-i d2 t}|1><2| + h.c.),  d_i = 2*pi*zeta_i/T.
    """
    knobs = knobs or ErrorKnobs()
    cfg = cfg or SimConfig()
    if cfg.frame != "two_photon_rotating":
        raise ValueError("evolve propagates the three-level rotating frame; "
                         "use transmon_evolve for the multilevel model")
    at = _interpolators(schedule)
    T = schedule.duration

    def ham_at(tm):
        o1, o2, d = at(tm)
        return _ham3(o1, o2, d, tm, knobs, T)

    return _propagate(ham_at, T, schedule.n_samples - 1, _substeps(schedule, cfg),
                      cfg.method, 3)


def population_trajectory(schedule: PulseSchedule, initial_state: int,
                          cfg: SimConfig | None = None,
                          knobs: ErrorKnobs | None = None):
    """Populations (P0, P1, P2) after every schedule sample, starting from a basis state."""
    if initial_state not in (0, 1, 2):
        raise ValueError("initial_state must be 0, 1, or 2")
    knobs = knobs or ErrorKnobs()
    cfg = cfg or SimConfig()
    at = _interpolators(schedule)
    T = schedule.duration

    def ham_at(tm):
        o1, o2, d = at(tm)
        return _ham3(o1, o2, d, tm, knobs, T)

    pops = np.empty((schedule.n_samples, 3))
    pops[0] = np.eye(3)[initial_state]

    def record(k, U):
        pops[k] = np.abs(U[:, initial_state]) ** 2

    _propagate(ham_at, T, schedule.n_samples - 1, _substeps(schedule, cfg),
               cfg.method, 3, record=record)
    return schedule.times, pops


# ---------------------------------------------------------------------------
# X-gate robustness scans
# ---------------------------------------------------------------------------

def _x_gate_assets(gate: str, duration: float, dt: float):
    design = xgate.design_for({"X": "X", "X02": "X02"}[gate], duration)
    schedule = xgate.rabi_from_invariant(design, dt)
    target = {"X": gates.X, "X02": gates.X02}[gate]
    correction = xgate.residual_phase_correction(design.kind)
    return schedule, correction, target


def robustness_scan(gate: str, eta_grid, zeta_grid, cfg: SimConfig | None = None,
                    duration: float = 35.0, dt: float = 0.05) -> dict:
    """Gate fidelity over amplitude-error and detuning-error grids.

    Returns {"amplitude": F[i,j] over eta_grid x eta_grid (zeta = 0),
             "detuning":  F[i,j] over zeta_grid x zeta_grid (eta = 0)}.
    """
    if gate not in ("X", "X02"):
        raise ValueError("gate must be X or X02")
    eta_grid = np.asarray(eta_grid, dtype=float)
    zeta_grid = np.asarray(zeta_grid, dtype=float)
    if np.abs(eta_grid).max(initial=0) > 0.15 + 1e-12 or np.abs(zeta_grid).max(initial=0) > 0.15 + 1e-12:
        raise ValueError("scan grids are limited to +/-0.15")
    cfg = cfg or SimConfig()
    schedule, correction, target = _x_gate_assets(gate, duration, dt)

    def fid(knobs: ErrorKnobs) -> float:
        U = evolve(schedule, knobs, cfg)
        return average_gate_fidelity(correction @ U, target)

    def run_grid(values, kind):
        tasks = [(i, j) for i in range(values.size) for j in range(values.size)]
        out = np.empty((values.size, values.size))

        def one(idx):
            i, j = idx
            if kind == "amplitude":
                kn = ErrorKnobs(eta1=values[i], eta2=values[j])
            else:
                kn = ErrorKnobs(zeta1=values[i], zeta2=values[j])
            return i, j, fid(kn)

        workers = _threads()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                for i, j, f in ex.map(one, tasks):
                    out[i, j] = f
        else:
            for idx in tasks:
                i, j, f = one(idx)
                out[i, j] = f
        return out

    return {"amplitude": run_grid(eta_grid, "amplitude"),
            "detuning": run_grid(zeta_grid, "detuning")}


# ---------------------------------------------------------------------------
# Multilevel transmon model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransmonModel:
    """Anharmonic ladder: omega_n = n*omega01 + n(n-1)/2 * alpha, sqrt(n) couplings."""
    levels: int = 4
    omega01: float = 2 * np.pi * 4.993
    anharmonicity: float = -2 * np.pi * 0.193
    drive_coupling: tuple = ()

    def __post_init__(self):
        if self.levels < 4:
            raise ValueError("transmon model needs at least 4 levels")
        if not self.drive_coupling:
            object.__setattr__(self, "drive_coupling",
                               tuple(np.sqrt(np.arange(1, self.levels))))
        elif len(self.drive_coupling) != self.levels - 1:
            raise ValueError("drive_coupling must have levels-1 entries")


@dataclass(frozen=True)
class DragParams:
    lambda1: float = 0.0
    lambda2: float = 0.0


def _tone_envelopes(schedule: PulseSchedule, model: TransmonModel,
                    drag: DragParams | None):
    """Fold the detuning track into tone phases; optionally add DRAG quadratures."""
    t = schedule.times
    o1 = np.asarray(schedule.omega1, dtype=complex).copy()
    o2 = np.asarray(schedule.omega2, dtype=complex).copy()
    if drag is not None and (drag.lambda1 or drag.lambda2):
        if model.anharmonicity == 0:
            raise ValueError("DRAG requires nonzero anharmonicity")
        o1 = o1 + 1j * drag.lambda1 / model.anharmonicity * np.gradient(o1.real, t)
        o2 = o2 + 1j * drag.lambda2 / model.anharmonicity * np.gradient(o2.real, t)
    de = np.asarray(schedule.detuning, dtype=float)
    chi = np.concatenate([[0.0], np.cumsum((de[1:] + de[:-1]) / 2 * np.diff(t))])
    v1 = o1 * np.exp(1j * chi)
    v2 = o2 * np.exp(-1j * chi)
    return v1, v2, chi[-1]


def transmon_evolve(schedule: PulseSchedule, model: TransmonModel | None = None,
                    drag: DragParams | None = None,
                    cfg: SimConfig | None = None):
    """Propagate on the anharmonic ladder with both tones coupling all transitions.

    Returns (U, leakage): U is the levels x levels propagator mapped back to the
    design frame on the computational block; leakage is the mean population
    escaping the block over computational-basis inputs.
    """
    model = model or TransmonModel()
    cfg = cfg or SimConfig(frame="multilevel_transmon")
    if cfg.frame != "multilevel_transmon":
        raise ValueError("transmon_evolve requires frame='multilevel_transmon'")
    L = model.levels
    alpha = model.anharmonicity
    g = np.asarray(model.drive_coupling, dtype=float)
    v1, v2, chiT = _tone_envelopes(schedule, model, drag)
    t = schedule.times
    # lab tone amplitudes normalized so the target-transition Rabi rates match the design
    u1 = v1 / g[0]
    u2 = v2 / g[1]
    eps = np.array([(n - 1) * (n - 2) / 2 * alpha if n >= 2 else 0.0 for n in range(L)])

    def at(tm, arr):
        return np.interp(tm, t, arr.real) + 1j * np.interp(tm, t, arr.imag)

    def ham_at(tm):
        a1 = at(tm, u1)
        a2 = at(tm, u2)
        H = np.diag(eps).astype(complex)
        rot = np.exp(1j * alpha * tm)
        for n in range(L - 1):
            if n == 0:
                c = g[0] / 2 * (a1 + a2 / rot)
            else:
                c = g[n] / 2 * (a1 * rot + a2)
            H[n + 1, n] = c
            H[n, n + 1] = np.conj(c)
        return H

    U = _propagate(ham_at, schedule.duration, schedule.n_samples - 1,
                   _substeps(schedule, cfg), cfg.method, L)
    frame_fix = np.eye(L, dtype=complex)
    frame_fix[1, 1] = np.exp(-1j * chiT)
    U = frame_fix @ U
    block = U[:3, :3]
    leakage = float(1.0 - np.linalg.norm(block, "fro") ** 2 / 3.0)
    return U, leakage


def block_fidelity(block: np.ndarray, target: np.ndarray,
                   optimize_phases: bool = True) -> float:
    """Average gate fidelity of a (possibly leaky) 3x3 block against a target.

    With optimize_phases, two trailing virtual phases diag(1, e^{i a}, e^{i b})
    are maximized out in closed form, matching the experimental virtual-Z freedom.
    """
    if optimize_phases:
        rows = (np.asarray(block) * np.asarray(target).conj()).sum(axis=1)
        s = float(np.abs(rows).sum())
        return (s**2 + 3) / 12
    return average_gate_fidelity(block, target)


def _transmon_gate_error(gate: str, model: TransmonModel, duration: float,
                         cfg: SimConfig | None = None, dt: float = 0.02):
    """Coherent error (1 - block fidelity) and leakage for an uncalibrated gate."""
    if gate == "H":
        schedule = chirped_h_schedule(duration, dt)
        U, leak = transmon_evolve(schedule, model, cfg=cfg)
        D1, D2 = sandwich_phases(solve_h_conditions())
        realized = D1 @ U[:3, :3] @ D2
        return 1.0 - block_fidelity(realized, gates.H), leak
    if gate == "X":
        design = xgate.design_for("X", duration)
        schedule = xgate.rabi_from_invariant(design, dt)
        U, leak = transmon_evolve(schedule, model, cfg=cfg)
        corr = xgate.residual_phase_correction("X")
        return 1.0 - block_fidelity(corr @ U[:3, :3], gates.X), leak
    raise ValueError("gate must be H or X")


def coherent_error_scan(axis: str, values, gate: str,
                        model: TransmonModel | None = None,
                        cfg: SimConfig | None = None,
                        duration: float = 35.0):
    """Sweep coherent error and leakage along anharmonicity or gate time.

    axis="anharmonicity": values are alpha in rad/ns (fixed duration);
    axis="gate_time": values are durations in ns (fixed model anharmonicity).
    """
    values = np.asarray(values, dtype=float)
    if values.size >= 2 and not (np.all(np.diff(values) > 0) or np.all(np.diff(values) < 0)):
        raise ValueError("scan values must be monotone")
    model = model or TransmonModel()
    out = []
    for v in values:
        if axis == "anharmonicity":
            m = replace(model, anharmonicity=float(v), drive_coupling=())
            out.append(_transmon_gate_error(gate, m, duration, cfg))
        elif axis == "gate_time":
            out.append(_transmon_gate_error(gate, model, float(v), cfg))
        else:
            raise ValueError("axis must be anharmonicity or gate_time")
    err = np.array([e for e, _ in out])
    leak = np.array([l for _, l in out])
    return err, leak
