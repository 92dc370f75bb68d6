import numpy as np
import pytest

from flatheat import (
    RodGeometry,
    SimulationConfig,
    TransitionSpec,
    bump_derivatives,
    eta_sequence,
    get_material,
    input_signal,
    mu_sequence,
    r_hat_sequence,
    simulate,
)

# The aluminum / steel benchmark: L = 0.2 m rod, smooth 300 -> 400 K
# transition over 1000 s with steepness 2, 101-node verification grid.


@pytest.fixture(scope="session")
def aluminum():
    return get_material("aluminum")


@pytest.fixture(scope="session")
def steel():
    return get_material("steel-38Si7")


@pytest.fixture(scope="session")
def rod():
    return RodGeometry(0.2)


@pytest.fixture(scope="session")
def step_spec():
    return TransitionSpec(omega=2.0, T=1000.0, y0=300.0, delta_y=100.0)


@pytest.fixture(scope="session")
def table40(step_spec):
    return bump_derivatives(step_spec, np.linspace(0.0, step_spec.T, 1001), 40)


def _diagnostics40(material, rod, table, delta_y):
    diag = eta_sequence(material, rod, 40)
    return r_hat_sequence(mu_sequence(diag, table, material, delta_y))


@pytest.fixture(scope="session")
def aluminum_diag(aluminum, rod, table40, step_spec):
    return _diagnostics40(aluminum, rod, table40, step_spec.delta_y)


@pytest.fixture(scope="session")
def steel_diag(steel, rod, table40, step_spec):
    return _diagnostics40(steel, rod, table40, step_spec.delta_y)


@pytest.fixture(scope="session")
def aluminum_signal(aluminum_diag, table40, aluminum, step_spec):
    return input_signal(aluminum_diag, table40, aluminum, step_spec, 40)


@pytest.fixture(scope="session")
def steel_signal(steel_diag, table40, steel, step_spec):
    return input_signal(steel_diag, table40, steel, step_spec, 40)


def _benchmark_config(material, rod):
    return SimulationConfig(
        material=material,
        geometry=rod,
        dt=0.1,
        t_end=1000.0,
        theta0=300.0,
        grid_points=101,
        probes=(0.05, 0.1, 0.2),
    )


@pytest.fixture(scope="session")
def aluminum_run(aluminum, rod, aluminum_signal):
    cfg = _benchmark_config(aluminum, rod)
    return cfg, simulate(cfg, aluminum_signal)


@pytest.fixture(scope="session")
def steel_run(steel, rod, steel_signal):
    cfg = _benchmark_config(steel, rod)
    return cfg, simulate(cfg, steel_signal)
