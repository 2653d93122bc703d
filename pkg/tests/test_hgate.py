import numpy as np
import pytest

from qutritctl import gates
from qutritctl.hgate import (
    chirp_ratio,
    chirped_h_schedule,
    h_phase_sandwich,
    propagator_constant,
)
from qutritctl.qmath import average_gate_fidelity, expm_hermitian, is_unitary


def ladder_hamiltonian(o1, o2, d):
    return np.array([[0, o1 / 2, 0], [o1 / 2, d, o2 / 2], [0, o2 / 2, 0]], dtype=complex)


def test_propagator_zero_drive_is_identity():
    assert np.abs(propagator_constant(0.0, 0.0, 0.0) - np.eye(3)).max() < 1e-14


def test_propagator_equal_modulus_point():
    U = propagator_constant(2.5906, 2.5906, 1.7050)
    assert np.abs(np.abs(U) - 1 / np.sqrt(3)).max() < 1e-3


def test_propagator_matches_expm_oracle(rng):
    worst = 0.0
    for _ in range(1000):
        o1, o2, d = rng.uniform(-8, 8, size=3)
        U = propagator_constant(o1, o2, d)
        V = expm_hermitian(ladder_hamiltonian(o1, o2, d), 1.0)
        worst = max(worst, np.abs(U - V).max())
        assert is_unitary(U, 1e-10)
    assert worst < 1e-9


def test_propagator_parity_symmetry(rng):
    P = gates.X02.real
    for _ in range(100):
        a, d = rng.uniform(-6, 6, size=2)
        U = propagator_constant(a, a, d)
        assert np.abs(P @ U @ P - U).max() < 1e-12


def test_solved_constants_match_reference_values(h_solution):
    sol = h_solution
    assert abs(abs(sol.A) - 4.0410) < 1e-3
    assert abs(abs(sol.delta) - 0.8525) < 1e-3
    assert abs(sol.omega1_T - 2.5906) < 1e-3
    assert sol.omega1_T == sol.omega2_T
    assert abs(abs(sol.delta_T) - 1.7050) < 1e-3
    ra, rb = sol.condition_residuals()
    assert abs(ra) < 1e-8 and abs(rb) < 1e-8


def test_solution_reduced_parameter_identities(h_solution):
    sol = h_solution
    omega0_T = np.sqrt(sol.A**2 - sol.delta_T**2)
    assert omega0_T == pytest.approx(3.6635, abs=2e-3)
    assert sol.omega1_T == pytest.approx(omega0_T / np.sqrt(2), abs=1e-12)
    assert sol.A**2 == pytest.approx(2 * sol.omega1_T**2 + sol.delta_T**2, abs=1e-6)


def test_solution_frequencies_at_35ns(h_solution):
    T = 35.0
    omega_mhz = h_solution.omega1_T / T / (2 * np.pi) * 1e3
    delta_mhz = abs(h_solution.delta_T) / T / (2 * np.pi) * 1e3
    assert omega_mhz == pytest.approx(11.7801, abs=1e-3)
    assert delta_mhz == pytest.approx(7.7531, abs=1e-3)


def test_sandwich_gives_hadamard(h_solution):
    U = propagator_constant(h_solution.omega1_T, h_solution.omega2_T, h_solution.delta_T)
    Hs = h_phase_sandwich(U, h_solution)
    assert average_gate_fidelity(Hs, gates.H) >= 1 - 1e-6


def test_sandwich_negative_detuning_gives_inverse(h_solution):
    sol = h_solution.with_sign(-1)
    U = propagator_constant(sol.omega1_T, sol.omega2_T, sol.delta_T)
    Hinv = h_phase_sandwich(U, sol)
    assert average_gate_fidelity(Hinv, gates.H_INV) >= 1 - 1e-6


def test_sandwich_pair_composes_to_identity(h_solution):
    Up = propagator_constant(h_solution.omega1_T, h_solution.omega2_T, h_solution.delta_T)
    Hs = h_phase_sandwich(Up, h_solution)
    solm = h_solution.with_sign(-1)
    Um = propagator_constant(solm.omega1_T, solm.omega2_T, solm.delta_T)
    Hinv = h_phase_sandwich(Um, solm)
    assert average_gate_fidelity(Hs @ Hinv, np.eye(3)) >= 1 - 1e-6


def test_chirped_schedule_areas(h_schedule):
    assert h_schedule.area("omega1") == pytest.approx(2.5906, abs=1e-4)
    assert h_schedule.area("omega2") == pytest.approx(2.5906, abs=1e-4)
    assert h_schedule.area("detuning") == pytest.approx(1.7050, abs=1e-4)
    ratio = h_schedule.area("detuning") / h_schedule.area("omega1")
    assert ratio == pytest.approx(0.6581, abs=1e-4)
    assert chirp_ratio() == pytest.approx(0.6581, abs=1e-4)


def test_chirped_schedule_boundaries(h_schedule):
    assert h_schedule.omega1[0] == 0.0 and h_schedule.omega1[-1] == 0.0
    assert h_schedule.omega2[0] == 0.0 and h_schedule.omega2[-1] == 0.0
    n = int(round(35.0 / 0.05)) + 1
    assert h_schedule.n_samples == n


def test_chirped_schedule_rejects_short_duration():
    with pytest.raises(ValueError):
        chirped_h_schedule(duration=8.0, dt=0.05, edge=5.0)
