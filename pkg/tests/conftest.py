import math

import numpy as np
import pytest

from cavsim import SimParams, TrajectoryState


@pytest.fixture
def fig_params() -> SimParams:
    """Reference parameter set at full size (N = 1000)."""
    return SimParams(
        n_atoms=1000,
        eta=500.0 / math.sqrt(1000.0),
        u0=-0.1,
        kappa=100.0,
        delta_c=-150.0,
        temp_init=200.0,
        dt=1e-2,
    )


def desk_params(n_atoms: int = 200, sqrt_n_eta: float = 500.0, **overrides) -> SimParams:
    """Reference physics at reduced atom number: sqrt(N) eta and N u0
    are held at 500 and -100."""
    values = dict(
        n_atoms=n_atoms,
        eta=sqrt_n_eta / math.sqrt(n_atoms),
        u0=-100.0 / n_atoms,
        kappa=100.0,
        delta_c=-150.0,
        temp_init=200.0,
        dt=1e-2,
    )
    values.update(overrides)
    return SimParams(**values)


def frozen_state(x, alpha=0.0, t=0.0) -> TrajectoryState:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return TrajectoryState(x=x, p=np.zeros_like(x), alpha=alpha, t=t)
