import pytest

from harmonic_dpo.model import SystemParams, solve_steady_state, working_point_from_eps1


@pytest.fixture
def above():
    """kappa=1, lambda=0.5 working point at a given eps1."""
    return lambda eps1, kappa=1.0, lam=0.5: working_point_from_eps1(kappa, lam, eps1)


@pytest.fixture
def undriven():
    return solve_steady_state(SystemParams(1.0, 0.5, 0.0))


@pytest.fixture
def below():
    # eps2 = lambda * beta = 2 lambda eps / kappa = 0.3
    return solve_steady_state(SystemParams(1.0, 0.5, 0.3))
