import numpy as np
import pytest

from qutritctl import clifford, hgate, xgate


@pytest.fixture(scope="session")
def h_solution():
    return hgate.solve_h_conditions()


@pytest.fixture(scope="session")
def clifford_group():
    return clifford.clifford_table()


@pytest.fixture(scope="session")
def pulse_gates():
    return clifford.pulse_gate_set()


@pytest.fixture(scope="session")
def x_schedule():
    return xgate.rabi_from_invariant(xgate.design_for("X"), 0.05)


@pytest.fixture(scope="session")
def x_inverse_schedule():
    return xgate.rabi_from_invariant(xgate.design_for("X_inverse"), 0.05)


@pytest.fixture(scope="session")
def h_schedule():
    return hgate.chirped_h_schedule(35.0, 0.05)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
