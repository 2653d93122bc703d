import numpy as np
import pytest

from qutritctl import gates, xgate
from qutritctl.hgate import h_phase_sandwich, solve_h_conditions
from qutritctl.pulses import PulseSchedule
from qutritctl.qmath import average_gate_fidelity, is_unitary
from qutritctl.sim import (
    DragParams,
    ErrorKnobs,
    SimConfig,
    TransmonModel,
    block_fidelity,
    coherent_error_scan,
    evolve,
    population_trajectory,
    robustness_scan,
    transmon_evolve,
)


def test_zero_schedule_gives_identity():
    n = 101
    z = np.zeros(n)
    sched = PulseSchedule(0.1, z, z.copy(), z.copy(), 10.0)
    U = evolve(sched)
    assert np.abs(U - np.eye(3)).max() < 1e-12


def test_chirped_h_simulation(h_schedule, h_solution):
    U = evolve(h_schedule)
    assert is_unitary(U, 1e-9)
    # the equal-modulus condition survives the time-dependent propagation
    assert np.abs(np.abs(U) - 1 / np.sqrt(3)).max() < 1e-3
    Hs = h_phase_sandwich(U, h_solution)
    assert average_gate_fidelity(Hs, gates.H) >= 0.9999


def test_x_schedule_simulation(x_schedule):
    U = evolve(x_schedule)
    corr = xgate.residual_phase_correction("X")
    assert average_gate_fidelity(corr @ U, gates.X) >= 0.9999


def test_convergence_contract(x_schedule):
    """Halving the integration step changes the propagator by < 1e-8."""
    U1 = evolve(x_schedule, cfg=SimConfig(dt=0.05))
    U2 = evolve(x_schedule, cfg=SimConfig(dt=0.025))
    assert np.abs(U1 - U2).max() < 1e-8


def test_integration_dt_must_not_exceed_sampling(x_schedule):
    with pytest.raises(ValueError):
        evolve(x_schedule, cfg=SimConfig(dt=0.2))


def test_rk4_fourth_order_against_expm_reference():
    sched = xgate.rabi_from_invariant(xgate.design_for("X"), 0.1)
    ref = evolve(sched, cfg=SimConfig(dt=0.003125))
    errs = []
    for dt in (0.1, 0.05, 0.025):
        errs.append(np.abs(evolve(sched, cfg=SimConfig(dt=dt, method="rk4")) - ref).max())
    r1 = errs[0] / errs[1]
    r2 = errs[1] / errs[2]
    assert 8 < r1 < 32 and 8 < r2 < 32  # ~dt^4 scaling


def test_knob_bounds():
    with pytest.raises(ValueError):
        ErrorKnobs(eta1=0.6)


def test_trajectory_probability_conserved(h_schedule):
    _, pops = population_trajectory(h_schedule, 0)
    assert np.abs(pops.sum(axis=1) - 1.0).max() < 1e-9


def test_trajectory_h_endpoints(h_schedule):
    _, pops = population_trajectory(h_schedule, 0)
    assert np.abs(pops[-1] - 1 / 3).max() < 1e-3


def test_trajectory_mirror_symmetry(h_schedule):
    """Starting from |0> and |2> gives P-mirrored population histories."""
    _, p0 = population_trajectory(h_schedule, 0)
    _, p2 = population_trajectory(h_schedule, 2)
    assert np.abs(p0[:, [2, 1, 0]] - p2).max() < 1e-6


def test_trajectory_x_transfer(x_schedule):
    _, pops = population_trajectory(x_schedule, 0)
    assert np.abs(pops[-1] - np.array([0.0, 1.0, 0.0])).max() < 1e-3


def test_trajectory_validates_state(h_schedule):
    with pytest.raises(ValueError):
        population_trajectory(h_schedule, 4)


@pytest.fixture(scope="module")
def grids():
    vals = np.linspace(-0.15, 0.15, 5)
    return vals, robustness_scan("X", vals, vals, dt=0.05)


class TestRobustness:
    def test_center_is_best(self, grids):
        vals, g = grids
        for key in ("amplitude", "detuning"):
            center = g[key][2, 2]
            assert center >= 0.9999
            assert center >= g[key].max() - 1e-6

    def test_single_tone_robustness(self, grids):
        vals, g = grids
        # +/-15% error on one tone keeps F >= 0.93; differential errors >= 0.95
        assert g["amplitude"][2, :].min() >= 0.93
        assert g["amplitude"][:, 2].min() >= 0.93
        assert min(g["amplitude"][0, -1], g["amplitude"][-1, 0]) >= 0.95

    def test_common_mode_amplitude_error_frozen_value(self, grids):
        # area error dominates on the common-mode diagonal
        vals, g = grids
        assert g["amplitude"][-1, -1] == pytest.approx(0.805, abs=0.01)

    def test_rejects_out_of_range_grid(self):
        with pytest.raises(ValueError):
            robustness_scan("X", np.array([0.3]), np.array([0.0]))


def test_scan_ordering_independent_of_threads(monkeypatch):
    vals = np.linspace(-0.1, 0.1, 3)
    serial = robustness_scan("X", vals, np.array([0.0]), dt=0.05)
    monkeypatch.setenv("QUTRITCTL_THREADS", "4")
    threaded = robustness_scan("X", vals, np.array([0.0]), dt=0.05)
    assert np.array_equal(serial["amplitude"], threaded["amplitude"])


def test_x02_grid_swap_symmetric():
    vals = np.linspace(-0.12, 0.12, 3)
    g = robustness_scan("X02", vals, np.array([0.0]), dt=0.05)
    assert np.abs(g["amplitude"] - g["amplitude"].T).max() < 1e-6


def test_pt_symmetry_of_propagator(x_inverse_schedule):
    """P U P equals the time-reversed schedule's propagator (= U^T for real drives)."""
    U = evolve(x_inverse_schedule)
    U_rev = evolve(x_inverse_schedule.time_reversed())
    P = gates.X02.real
    assert np.abs(U_rev - U.T).max() < 1e-8
    assert np.abs(P @ U @ P - U_rev).max() < 1e-8


class TestTransmon:
    def test_decoupling_limit(self, x_schedule):
        model = TransmonModel(anharmonicity=-2 * np.pi * 2.0)
        U, leak = transmon_evolve(x_schedule, model)
        corr = xgate.residual_phase_correction("X")
        f_trans = block_fidelity(corr @ U[:3, :3], gates.X)
        U3 = evolve(x_schedule)
        f_ideal = block_fidelity(corr @ U3, gates.X)
        assert abs(f_trans - f_ideal) < 1e-3
        assert leak < 1e-5

    def test_levels_validation(self):
        with pytest.raises(ValueError):
            TransmonModel(levels=3)

    def test_h_error_below_x_error(self, h_schedule, x_schedule):
        model = TransmonModel(anharmonicity=-2 * np.pi * 0.2)
        sol = solve_h_conditions()
        Uh, leak_h = transmon_evolve(h_schedule, model)
        fh = block_fidelity(h_phase_sandwich(Uh[:3, :3], sol), gates.H)
        Ux, leak_x = transmon_evolve(x_schedule, model)
        fx = block_fidelity(xgate.residual_phase_correction("X") @ Ux[:3, :3], gates.X)
        assert (1 - fh) < (1 - fx)
        assert leak_h < 1 - fh  # leakage is a subdominant contribution
        assert leak_x < (1 - fx) / 3

    def test_drag_reduces_nothing_at_zero(self, x_schedule):
        model = TransmonModel()
        U0, _ = transmon_evolve(x_schedule, model)
        U1, _ = transmon_evolve(x_schedule, model, drag=DragParams(0.0, 0.0))
        assert np.abs(U0 - U1).max() < 1e-12


def test_coherent_error_scan_trends():
    alphas = -2 * np.pi * np.array([150, 200, 300, 400]) / 1e3
    err_x, leak_x = coherent_error_scan("anharmonicity", alphas, "X")
    err_h, leak_h = coherent_error_scan("anharmonicity", alphas, "H")
    # |alpha| increases along the sweep (values become more negative)
    assert np.all(np.diff(err_x) < 0.1 * err_x[:-1])
    assert np.all(np.diff(err_h) < 0.1 * err_h[:-1])
    assert np.all(err_h <= err_x)
    assert np.all(np.diff(leak_x) < 0.1 * np.maximum(leak_x[:-1], 1e-12))


def test_coherent_error_scan_validates_axis():
    with pytest.raises(ValueError):
        coherent_error_scan("bogus", [1.0], "X")
    with pytest.raises(ValueError):
        coherent_error_scan("gate_time", [35.0, 25.0, 50.0], "X")
