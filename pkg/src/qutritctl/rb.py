"""Randomized benchmarking: sequence generation, noisy execution, decay fits,
and the analytic error budget formulas."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .clifford import CliffordTable, clifford_table
from .errors import FitError

DEFAULT_LENGTHS = (1, 5, 10, 20, 35, 50, 75, 100)


@dataclass(frozen=True)
class NoiseModel:
    """Tagged union: ideal | depolarizing(p) | pulse | transmon.

    The pulse and transmon kinds carry gate_unitaries, mapping every physical
    gate kind to its simulated 3x3 matrix: exact rotating-frame propagators
    with parameter errors for "pulse", leaky computational blocks of the
    multilevel model (coherent errors, no decoherence) for "transmon".
    """
    kind: str = "ideal"
    p: float = 1.0
    gate_unitaries: Optional[dict] = None

    def __post_init__(self):
        if self.kind not in ("ideal", "depolarizing", "pulse", "transmon"):
            raise ValueError("noise kind must be ideal, depolarizing, pulse, or transmon")
        if self.kind == "depolarizing" and not (0.0 < self.p <= 1.0):
            raise ValueError("depolarizing parameter must lie in (0, 1]")
        if self.kind in ("pulse", "transmon") and not self.gate_unitaries:
            raise ValueError(f"{self.kind} noise needs gate unitaries")


@dataclass(frozen=True)
class RBConfig:
    lengths: tuple = DEFAULT_LENGTHS
    n_sequences: int = 30
    shots: int = 200
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)
    interleaved: Optional[str] = None  # gate kind, or "clifford:<index>"
    interleaved_noise: Optional[NoiseModel] = None

    def __post_init__(self):
        L = tuple(int(m) for m in self.lengths)
        if not L or any(m < 1 for m in L):
            raise ValueError("lengths must all be >= 1")
        if any(b <= a for a, b in zip(L, L[1:])):
            raise ValueError("lengths must be strictly increasing")
        object.__setattr__(self, "lengths", L)


@dataclass
class DecayFit:
    A: float
    p: float
    B: float
    residual: float


def _interleaved_index(table: CliffordTable, name: str) -> int:
    if name.startswith("clifford:"):
        return int(name.split(":", 1)[1])
    from . import gates
    mats = {"H": gates.H, "X": gates.X, "Z": gates.Z, "S": gates.S,
            "X02": gates.X02, "X01": gates.X01, "X12": gates.X12}
    return table.lookup(mats[name])


def rb_sequence(m: int, seed, table: CliffordTable | None = None,
                interleaved: Optional[str] = None) -> list:
    """m uniform Clifford indices (interleaved target inserted after each),
    closed by the exact group inverse so ideal survival of |0> is 1."""
    table = table or clifford_table()
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, len(table), size=m)
    seq = []
    for idx in draws:
        seq.append(int(idx))
        if interleaved is not None:
            seq.append(_interleaved_index(table, interleaved))
    total = table.lookup(np.eye(3))
    for idx in seq:
        total = table.product_index(idx, total)
    seq.append(table.inverse_index(total))
    return seq


def _survival_depolarizing(seq: Sequence[int], p: float) -> float:
    """Distribution-level depolarizing channel after every gate in the sequence.

    Ideal recovery makes the coherent part return to |0>, so survival is
    p^n + (1 - p^n)/3 for n applications.
    """
    n = len(seq)
    return p**n + (1.0 - p**n) / 3.0


def _survival_pulse(seq: Sequence[int], table: CliffordTable, unitaries: dict) -> float:
    from .clifford import simulate_word
    U = np.eye(3, dtype=complex)
    for idx in seq:
        U = simulate_word(table[idx].word, unitaries) @ U
    return float(abs(U[0, 0]) ** 2)


def run_rb(cfg: RBConfig, table: CliffordTable | None = None):
    """Survival statistics (m, mean P0, std) under the configured noise.

    Depolarizing noise is propagated analytically per gate and then sampled
    with the configured shot count; pulse noise composes the simulated gate
    unitaries.  Deterministic for a fixed seed.
    """
    table = table or clifford_table()
    points = []
    for im, m in enumerate(cfg.lengths):
        vals = []
        for k in range(cfg.n_sequences):
            seed = np.random.SeedSequence([cfg.seed, im, k])
            seq = rb_sequence(m, seed, table, cfg.interleaved)
            if cfg.noise.kind == "ideal":
                s = 1.0
            elif cfg.noise.kind == "depolarizing":
                if cfg.interleaved is not None:
                    # reference channel on the Cliffords; the interleaved target
                    # is ideal unless it carries its own depolarizing parameter
                    p_t = cfg.interleaved_noise.p if cfg.interleaved_noise is not None else 1.0
                    n_cliffords = len(seq) - m
                    pprod = (cfg.noise.p ** n_cliffords) * (p_t ** m)
                    s = pprod + (1 - pprod) / 3.0
                else:
                    s = _survival_depolarizing(seq, cfg.noise.p)
            else:  # pulse or transmon: compose simulated gate matrices
                s = _survival_pulse(seq, table, cfg.noise.gate_unitaries)
            if cfg.shots:
                shot_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, im, k, 7]))
                s = shot_rng.binomial(cfg.shots, min(max(s, 0.0), 1.0)) / cfg.shots
            vals.append(s)
        vals = np.asarray(vals)
        points.append((m, float(vals.mean()), float(vals.std(ddof=1) if len(vals) > 1 else 0.0)))
    return points


def fit_decay(points) -> DecayFit:
    """Least-squares fit of survival(m) = A p^m + B."""
    ms = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    if len(set(ms)) < 3:
        raise FitError("need at least 3 distinct sequence lengths")
    if np.ptp(ys) < 1e-12:
        raise FitError("survival data are constant; decay parameter unidentifiable")

    def model(x, A, p, B):
        return A * p**x + B

    B0 = 1.0 / 3.0
    A0 = ys[0] - B0
    with np.errstate(all="ignore"):
        if abs(A0) > 1e-12 and abs(ys[-1] - B0) > 1e-12 and (ys[-1] - B0) / A0 > 0:
            p0 = float(np.clip(((ys[-1] - B0) / A0) ** (1.0 / (ms[-1] - ms[0])), 1e-3, 1.0))
        else:
            p0 = 0.95
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(model, ms, ys, p0=[A0, p0, B0],
                                bounds=([-1.5, 1e-6, -0.5], [1.5, 1.0, 1.0]), maxfev=20000)
    except Exception as exc:  # noqa: BLE001 - curve_fit raises RuntimeError/ValueError
        raise FitError(f"decay fit failed: {exc}") from exc
    resid = float(np.sqrt(np.mean((model(ms, *popt) - ys) ** 2)))
    return DecayFit(A=float(popt[0]), p=float(popt[1]), B=float(popt[2]), residual=resid)


def clifford_error(p_c: float, d: int = 3) -> float:
    """Average error per Clifford: r_c = (1 - p_c)(1 - 1/d)."""
    if not (0.0 < p_c <= 1.0):
        raise ValueError("depolarization parameter must lie in (0, 1]")
    return (1.0 - p_c) * (1.0 - 1.0 / d)


def irb_error(p_gate: float, p_ref: float, d: int = 3) -> float:
    """Interleaved gate error r_g = (1 - p_gate/p_ref)(1 - 1/d); negative values
    (p_gate > p_ref) are returned as-is for the caller to flag."""
    if not (0.0 < p_gate <= 1.0 and 0.0 < p_ref <= 1.0):
        raise ValueError("depolarization parameters must lie in (0, 1]")
    return (1.0 - p_gate / p_ref) * (1.0 - 1.0 / d)


def incoherent_error_estimate(device, tau_ns: float) -> float:
    """Decoherence-limited average gate error for a pulse of duration tau (ns).

    eps = (1/12)(2/T2_01 + 2/T2_12 + 2/T2_02 + 1/T1_01 + 1/T1_12) * tau.
    """
    for name in ("T1_01", "T1_12", "T2_01", "T2_12", "T2_02"):
        if getattr(device, name) <= 0:
            raise ValueError(f"{name} must be positive")
    rate_us = (2.0 / device.T2_01 + 2.0 / device.T2_12 + 2.0 / device.T2_02
               + 1.0 / device.T1_01 + 1.0 / device.T1_12) / 12.0
    return float(rate_us * tau_ns * 1e-3)


def rb_result_json(cfg: RBConfig, points, fit: DecayFit, r: float) -> str:
    payload = {
        "config": {
            "lengths": list(cfg.lengths), "n_sequences": cfg.n_sequences,
            "shots": cfg.shots, "seed": cfg.seed,
            "noise": {"kind": cfg.noise.kind, "p": cfg.noise.p},
            "interleaved": cfg.interleaved,
        },
        "points": [{"m": m, "mean": mu, "std": sd} for m, mu, sd in points],
        "fit": {"A": fit.A, "p": fit.p, "B": fit.B, "residual": fit.residual},
        "r": r,
    }
    return json.dumps(payload, sort_keys=True)
