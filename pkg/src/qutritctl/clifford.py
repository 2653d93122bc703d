"""Qutrit Pauli/Clifford group construction and the virtual-Z compiler.

The group is enumerated by a shortest-word search over the experiment's
gate alphabet: seven one-step physical gates (Hadamard pair, the five
non-identity X-type gates) and four zero-cost virtual phase gates (S, S^2,
Z, Z^2).  Words minimize the physical-gate count, with ties broken by total
length and then lexicographically, so the stored decompositions are exactly
what the pulse compiler would schedule.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import gates, xgate
from .hgate import chirped_h_schedule, sandwich_phases, solve_h_conditions
from .qmath import average_gate_fidelity, canonical_key, canonicalize_phase

PHYSICAL_KINDS = ("H", "H_inv", "X", "X_inv", "X01", "X12", "X02")

_PHYS_MATS = {
    "H": gates.H, "H_inv": gates.H_INV, "X": gates.X, "X_inv": gates.X_INV,
    "X01": gates.X01, "X12": gates.X12, "X02": gates.X02,
}

# (label, (phi1, phi2)) for the named virtual gates
_VIRT_PHASES = {
    "S": (0.0, 2 * np.pi / 3),
    "S2": (0.0, 4 * np.pi / 3),
    "Z": (2 * np.pi / 3, 2 * np.pi / 3),
    "Z2": (4 * np.pi / 3, 4 * np.pi / 3),
}


@dataclass(frozen=True)
class GateOp:
    """One circuit operation: a physical gate kind or a virtual phase.

    Physical gates carry per-tone drive phase offsets (phi1, phi2), realized
    by re-phasing their pulses; a VirtualPhase op is diag(1, e^{i phi1},
    e^{i(phi1+phi2)}) and consumes zero time.
    """
    kind: str
    phases: tuple = (0.0, 0.0)
    drive_phases: tuple = (0.0, 0.0)
    label: str = ""

    def __post_init__(self):
        if self.kind not in PHYSICAL_KINDS and self.kind != "VirtualPhase":
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @property
    def is_virtual(self) -> bool:
        return self.kind == "VirtualPhase"

    def display(self) -> str:
        if self.is_virtual:
            return self.label or f"Vz({self.phases[0]:.4f},{self.phases[1]:.4f})"
        return self.kind


def virtual_op(label: str) -> GateOp:
    return GateOp("VirtualPhase", phases=_VIRT_PHASES[label], label=label)


def gate_matrix(op: GateOp) -> np.ndarray:
    if op.is_virtual:
        return gates.virtual_phase(*op.phases)
    U = _PHYS_MATS[op.kind]
    if op.drive_phases != (0.0, 0.0):
        Zp = gates.virtual_phase(*op.drive_phases)
        U = Zp.conj().T @ U @ Zp
    return U


def word_unitary(word: Sequence[GateOp]) -> np.ndarray:
    """Product of a time-ordered word (first op applied first)."""
    U = np.eye(3, dtype=complex)
    for op in word:
        U = gate_matrix(op) @ U
    return U


def pauli_generators():
    """The qutrit Pauli pair: cyclic X and clock Z with X^3 = Z^3 = I, ZX = w XZ."""
    return gates.X.copy(), gates.Z.copy()


@dataclass(frozen=True)
class CliffordElement:
    index: int
    canonical: np.ndarray
    word: tuple

    def physical_count(self) -> int:
        return sum(1 for op in self.word if not op.is_virtual)


class CliffordTable:
    """The 216-element single-qutrit Clifford group with shortest physical words."""

    def __init__(self, elements: list, key_to_index: dict):
        self.elements = elements
        self._key_to_index = key_to_index

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> CliffordElement:
        return self.elements[i]

    def lookup(self, U: np.ndarray) -> int:
        """Index of a unitary modulo global phase; KeyError if not in the group."""
        return self._key_to_index[canonical_key(U)]

    def inverse_index(self, i: int) -> int:
        return self.lookup(self.elements[i].canonical.conj().T)

    def product_index(self, i: int, j: int) -> int:
        """Index of element_i applied after element_j."""
        return self.lookup(self.elements[i].canonical @ self.elements[j].canonical)

    def average_counts(self) -> dict:
        """Mean stored-word gate counts per element, grouped as (H, S, X, Z) families."""
        tot = {"H": 0, "S": 0, "X": 0, "Z": 0, "physical": 0}
        for el in self.elements:
            for op in el.word:
                if op.kind in ("H", "H_inv"):
                    tot["H"] += 1
                    tot["physical"] += 1
                elif op.kind in ("X", "X_inv", "X01", "X12", "X02"):
                    tot["X"] += 1
                    tot["physical"] += 1
                elif op.label in ("S", "S2"):
                    tot["S"] += 1
                else:
                    tot["Z"] += 1
        n = len(self.elements)
        return {k: v / n for k, v in tot.items()}

    def verify_words(self) -> float:
        """Minimum fidelity between each stored word's product and its canonical matrix."""
        worst = 1.0
        for el in self.elements:
            worst = min(worst, average_gate_fidelity(word_unitary(el.word), el.canonical))
        return worst

    def verify_group_axioms(self) -> bool:
        """Exhaustive closure under products and inverses, modulo global phase."""
        keys = self._key_to_index
        mats = [el.canonical for el in self.elements]
        for M in mats:
            if canonical_key(M.conj().T) not in keys:
                return False
        for A in mats:
            for B in mats:
                if canonical_key(A @ B) not in keys:
                    return False
        return True

    def to_json(self) -> str:
        out = []
        for el in self.elements:
            word = []
            for op in el.word:
                if op.is_virtual:
                    word.append({"gate": op.label or "Vz", "phases": list(op.phases)})
                else:
                    word.append({"gate": op.kind})
            mat = [[[float(v.real), float(v.imag)] for v in row] for row in el.canonical]
            out.append({"index": el.index, "matrix": mat, "word": word})
        return json.dumps({"size": len(self.elements), "elements": out}, sort_keys=True)


_ENUMERATION_BOUND = 10_000


def _dijkstra_words(generators: list, cost_of: dict) -> dict:
    """Shortest words over a generator list; cost = (physical count, length, lex)."""
    eye = np.eye(3, dtype=complex)
    start_key = canonical_key(eye)
    pq = [(0, 0, (), start_key)]
    mats = {start_key: eye}
    settled: dict = {}
    while pq:
        nphys, wl, word, key = heapq.heappop(pq)
        if key in settled:
            continue
        settled[key] = (word, mats[key])
        if len(settled) > _ENUMERATION_BOUND:
            raise RuntimeError("group closure exceeded safety bound; canonicalization bug?")
        U = mats[key]
        for gi, (name, G) in enumerate(generators):
            V = canonicalize_phase(G @ U)
            vkey = canonical_key(V)
            if vkey in settled:
                continue
            mats.setdefault(vkey, V)
            heapq.heappush(pq, (nphys + cost_of[name], wl + 1, word + (gi,), vkey))
    return settled


@lru_cache(maxsize=1)
def clifford_table() -> CliffordTable:
    """Enumerate C3 over the redundant experimental alphabet (cached)."""
    generators = [(k, _PHYS_MATS[k]) for k in PHYSICAL_KINDS]
    generators += [(lbl, gates.virtual_phase(*ph)) for lbl, ph in _VIRT_PHASES.items()]
    cost = {k: 1 for k in PHYSICAL_KINDS}
    cost.update({lbl: 0 for lbl in _VIRT_PHASES})
    settled = _dijkstra_words(generators, cost)

    ops = []
    for name, _ in generators:
        if name in PHYSICAL_KINDS:
            ops.append(GateOp(name))
        else:
            ops.append(virtual_op(name))

    elements = []
    key_to_index = {}
    for idx, (key, (word, U)) in enumerate(settled.items()):
        elements.append(CliffordElement(index=idx, canonical=U,
                                        word=tuple(ops[gi] for gi in word)))
        key_to_index[key] = idx
    table = CliffordTable(elements, key_to_index)
    if len(table) != 216:
        raise RuntimeError(f"expected 216 Clifford elements, found {len(table)}")
    return table


def enumerate_clifford() -> CliffordTable:
    return clifford_table()


def plain_alphabet_averages() -> dict:
    """Average letter counts over shortest words in the plain {H, S, X, Z} set.

    The usual convention when quoting per-Clifford gate counts: every
    letter costs one gate and total word length is minimized.
    """
    generators = [("H", gates.H), ("S", gates.S), ("X", gates.X), ("Z", gates.Z)]
    cost = {name: 1 for name, _ in generators}
    settled = _dijkstra_words(generators, cost)
    if len(settled) != 216:
        raise RuntimeError("restricted alphabet failed to generate the group")
    tot = {"H": 0, "S": 0, "X": 0, "Z": 0}
    names = [n for n, _ in generators]
    for word, _ in settled.values():
        for gi in word:
            tot[names[gi]] += 1
    return {k: v / len(settled) for k, v in tot.items()}


def verify_minimal_set_identity() -> dict:
    """Check X = H S H^2 S^2 H up to global phase; returns fidelity and letter counts."""
    factors = [gates.H, gates.S, gates.H, gates.H, gates.S, gates.S, gates.H]
    U = np.eye(3, dtype=complex)
    for M in factors:  # matrix product in written order, H . S . H^2 . S^2 . H
        U = U @ M
    return {"fidelity": average_gate_fidelity(U, gates.X),
            "h_count": 4, "s_count": 3}


def compile_virtual_z(circuit: Sequence[GateOp]):
    """Push every virtual phase to the end of the circuit.

    Each physical gate U with pending accumulated phase Z becomes
    Z^dag U Z, realized by adding the pending (phi1, phi2) to its drive phase
    offsets; the returned trailing VirtualPhase collects the total and can be
    dropped before a computational-basis measurement.
    """
    acc1 = acc2 = 0.0
    physical = []
    for op in circuit:
        if op.is_virtual:
            acc1 += op.phases[0]
            acc2 += op.phases[1]
        else:
            dp = (op.drive_phases[0] + acc1, op.drive_phases[1] + acc2)
            physical.append(replace(op, drive_phases=dp))
    trailing = GateOp("VirtualPhase", phases=(acc1, acc2))
    return physical, trailing


# ---------------------------------------------------------------------------
# Pulse-level realization of the physical alphabet
# ---------------------------------------------------------------------------

def gate_realization(kind: str, duration: float = 35.0, dt: float = 0.05):
    """(schedule, pre_diag, post_diag) such that post @ U_sim @ pre realizes the gate."""
    eye = np.eye(3, dtype=complex)
    if kind in ("H", "H_inv"):
        sign = +1 if kind == "H" else -1
        sol = solve_h_conditions().with_sign(sign)
        D1, D2 = sandwich_phases(sol)
        return chirped_h_schedule(duration, dt, sign=sign), D2, D1
    if kind in ("X", "X_inv", "X02"):
        design_kind = {"X": "X", "X_inv": "X_inverse", "X02": "X02"}[kind]
        design = xgate.design_for(design_kind, duration)
        sched = xgate.rabi_from_invariant(design, dt)
        return sched, eye, xgate.residual_phase_correction(design_kind)
    if kind in ("X01", "X12"):
        return (xgate.subspace_pi_schedule(kind, duration, dt), eye,
                xgate.subspace_phase_correction(kind))
    raise ValueError(f"no pulse realization for {kind!r}")


def pulse_gate_set(duration: float = 35.0, dt: float = 0.05,
                   simulate=None) -> dict:
    """Simulated unitary for every physical gate kind, corrections applied.

    simulate defaults to the ideal rotating-frame propagator; pass a callable
    schedule -> 3x3 matrix to substitute a noisy or multilevel backend.
    """
    if simulate is None:
        from .sim import evolve
        simulate = evolve
    out = {}
    for kind in PHYSICAL_KINDS:
        sched, pre, post = gate_realization(kind, duration, dt)
        out[kind] = post @ simulate(sched) @ pre
    return out


def simulate_word(word: Sequence[GateOp], gate_unitaries: dict) -> np.ndarray:
    """Pulse-level product of a word: physical kinds from the table, phases exact."""
    U = np.eye(3, dtype=complex)
    for op in word:
        if op.is_virtual:
            U = gates.virtual_phase(*op.phases) @ U
        else:
            G = gate_unitaries[op.kind]
            if op.drive_phases != (0.0, 0.0):
                Zp = gates.virtual_phase(*op.drive_phases)
                G = Zp.conj().T @ G @ Zp
            U = G @ U
    return U
