"""Sampled drive schedules and envelope primitives.

A PulseSchedule carries the two Rabi tracks Omega1(t), Omega2(t) and the
detuning track Delta(t) on a uniform grid over [0, T].  Units are rad/ns and
ns throughout.  Envelopes are real for the analytic designs; calibration
rendering may fold chirp/DRAG phases in, making them complex.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEDULE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class PulseSchedule:
    dt: float
    omega1: np.ndarray
    omega2: np.ndarray
    detuning: np.ndarray
    duration: float

    def __post_init__(self):
        n = int(round(self.duration / self.dt)) + 1
        for name in ("omega1", "omega2", "detuning"):
            arr = np.asarray(getattr(self, name))
            object.__setattr__(self, name, arr)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have {n} samples, got {arr.shape}")
        for name in ("omega1", "omega2"):
            arr = getattr(self, name)
            if abs(arr[0]) > 1e-12 or abs(arr[-1]) > 1e-12:
                raise ValueError(f"{name} must start and end at zero")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.duration, self.omega1.size)

    @property
    def n_samples(self) -> int:
        return self.omega1.size

    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.omega1) or np.iscomplexobj(self.omega2))

    def area(self, track: str = "omega1") -> float:
        """Trapezoidal integral of a track over [0, T]."""
        return float(np.trapezoid(np.real(getattr(self, track)), self.times))

    def time_reversed(self) -> "PulseSchedule":
        return PulseSchedule(self.dt, self.omega1[::-1].copy(), self.omega2[::-1].copy(),
                             self.detuning[::-1].copy(), self.duration)

    def to_dict(self) -> dict:
        def track(arr):
            arr = np.asarray(arr)
            if np.iscomplexobj(arr):
                return [[float(v.real), float(v.imag)] for v in arr]
            return [float(v) for v in arr]

        return {
            "version": SCHEDULE_FORMAT_VERSION,
            "units": {"time": "ns", "rate": "rad/ns"},
            "dt": self.dt,
            "duration": self.duration,
            "omega1": track(self.omega1),
            "omega2": track(self.omega2),
            "detuning": track(self.detuning),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PulseSchedule":
        def arr(v):
            a = np.asarray(v, dtype=float)
            if a.ndim == 2:  # [re, im] pairs
                return a[:, 0] + 1j * a[:, 1]
            return a

        return cls(dt=float(data["dt"]), omega1=arr(data["omega1"]),
                   omega2=arr(data["omega2"]), detuning=arr(data["detuning"]),
                   duration=float(data["duration"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "PulseSchedule":
        return cls.from_dict(json.loads(Path(path).read_text()))


def time_grid(duration: float, dt: float) -> np.ndarray:
    n = int(round(duration / dt))
    if abs(n * dt - duration) > dt * 1e-6:
        raise ValueError(f"dt={dt} does not divide duration={duration} to within one sample")
    return np.linspace(0.0, duration, n + 1)


def flat_top_envelope(t: np.ndarray, duration: float, edge: float,
                      edge_sigma_ratio: float = 2.5) -> np.ndarray:
    """Unit flat-top with truncated-Gaussian rise/fall edges, exactly zero at t=0, T.

    The Gaussian is offset-subtracted so the boundary values vanish;
    sigma = edge / edge_sigma_ratio.
    """
    if duration <= 2 * edge:
        raise ValueError(f"duration {duration} must exceed twice the edge {edge}")
    sigma = edge / edge_sigma_ratio
    floor = np.exp(-0.5 * (edge / sigma) ** 2)
    env = np.ones_like(t, dtype=float)
    rise = t < edge
    fall = t > duration - edge
    env[rise] = (np.exp(-0.5 * ((t[rise] - edge) / sigma) ** 2) - floor) / (1 - floor)
    env[fall] = (np.exp(-0.5 * ((t[fall] - (duration - edge)) / sigma) ** 2) - floor) / (1 - floor)
    return env


def sine_squared_pi_pulse(duration: float, dt: float) -> np.ndarray:
    """sin^2 envelope with pulse area exactly pi (resonant subspace pi rotation)."""
    t = time_grid(duration, dt)
    return (2 * np.pi / duration) * np.sin(np.pi * t / duration) ** 2
