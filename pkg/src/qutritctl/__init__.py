"""Qutrit gate synthesis, pulse-level simulation, Clifford benchmarking,
and qudit phase-estimation / parity-check algorithms."""

__version__ = "0.1.0"

from .pulses import PulseSchedule
from .qmath import average_gate_fidelity, canonicalize_phase, expm_hermitian

__all__ = [
    "PulseSchedule",
    "average_gate_fidelity",
    "canonicalize_phase",
    "expm_hermitian",
    "__version__",
]
